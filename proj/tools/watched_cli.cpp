#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "watched/config.hpp"
#include "watched/errors.hpp"
#include "watched/run.hpp"

using namespace watched;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int jobs = 0;
  long long seed = -1;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--set", o.overrides, "Override a config key, e.g. system.beta=0.05 (repeatable)");
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--jobs", o.jobs, "Concurrent sweep points")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Seed for Monte Carlo estimates")->check(CLI::NonNegativeNumber);
}

int execute(cli::Scenario scenario, const Options& o) {
  nlohmann::json j = nlohmann::json::object();
  try {
    if (!o.config_path.empty()) j = cli::config_to_json(cli::load_config(o.config_path));
    j["scenario"] = cli::to_string(scenario);
    for (const auto& kv : o.overrides) cli::apply_override(j, kv);
    if (!o.out_dir.empty()) j["output"]["dir"] = o.out_dir;
    if (o.jobs > 0) j["jobs"] = o.jobs;
    if (o.seed >= 0) j["seed"] = static_cast<std::uint64_t>(o.seed);
    const auto config = cli::config_from_json(j);
    return cli::run(config, std::cerr);
  } catch (const IoError& e) {
    std::cerr << nlohmann::json{{"error", {{"exit_code", 3}, {"kind", "io"}, {"message", e.what()}}}}.dump() << '\n';
    return cli::kIo;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", {{"exit_code", 1}, {"kind", "validation"}, {"message", e.what()}}}}.dump()
              << '\n';
    return cli::kValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decay of an excited atom near a photodetector"};
  app.require_subcommand(1);

  Options opts;
  const std::vector<std::pair<cli::Scenario, std::string>> commands = {
      {cli::Scenario::Vacuum, "Vacuum decay on a radial mode grid"},
      {cli::Scenario::SingleDetector, "Decay next to detector atoms on a 3D mode grid"},
      {cli::Scenario::Shell, "Closed-form shell detector and its Monte Carlo check"},
      {cli::Scenario::ToyDynamics, "Scalar toy model with one detector"},
      {cli::Scenario::RouteCompare, "ODE route against the inverse Laplace route"},
      {cli::Scenario::Sweep, "Decay rate over a parameter grid"},
  };
  cli::Scenario chosen = cli::Scenario::Vacuum;
  for (const auto& [scenario, help] : commands) {
    auto* cmd = app.add_subcommand(cli::to_string(scenario), help);
    add_common(cmd, opts);
    const auto s = scenario;
    cmd->callback([&chosen, s] { chosen = s; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kValidation;
  }
  return execute(chosen, opts);
}
