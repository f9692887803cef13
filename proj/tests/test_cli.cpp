#include "doctest.h"

#include "approx.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "watched/config.hpp"
#include "watched/errors.hpp"
#include "watched/run.hpp"

using namespace watched;
using namespace watched::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "watched_test_cli" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig quick_shell(const fs::path& dir) {
  RunConfig c;
  c.scenario = Scenario::Shell;
  c.shell.n_atoms = 0;
  c.shell.mc_samples = 200;
  c.shell.l2_mc_samples = 5000;
  c.output.dir = dir.string();
  return c;
}

RunConfig with_detector() {
  RunConfig c;
  DetectorAtom d;
  d.position = Vec3(2.0, 0.0, 0.0);
  c.system.detector_atoms.push_back(d);
  return c;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c = with_detector();
  c.scenario = Scenario::Sweep;
  c.sweep = SweepSpec{"r", {1.0, 2.5}};
  c.system.beta = 0.07;
  c.system.dos.shape = DosShape::PowerLaw;
  c.system.dos.exponent = -0.5;
  c.grid.n_theta = 6;
  c.toy.z = 1.25;
  c.solver.rotating_frame = false;
  c.solver.times = {1.0, 2.0};
  c.contour.method = laplace::Method::Talbot;
  c.thresholds.far_field_z = 9.0;
  c.route.model = ModelKind::Radial1D;
  c.output.model_csv = true;
  c.seed = 12345678901234ULL;
  c.jobs = 3;
  const json j = config_to_json(c);
  CHECK(j.at("schema_version") == kSchemaVersion);
  CHECK(config_from_json(j) == c);
  CHECK(config_from_json(json::parse(j.dump())) == c);
  CHECK(config_from_json(json::object()) == RunConfig{});
}

TEST_CASE("unknown keys and bad values are rejected") {
  json j = config_to_json(RunConfig{});
  j["system"]["gama"] = 0.1;
  CHECK_THROWS_AS(config_from_json(j), InvalidInput);
  json k = json::object();
  k["grid"]["n_modes"] = "many";
  CHECK_THROWS_AS(config_from_json(k), InvalidInput);
  json s = json::object();
  s["scenario"] = "orbit";
  CHECK_THROWS_AS(config_from_json(s), InvalidInput);
}

TEST_CASE("dotted overrides") {
  json j = config_to_json(with_detector());
  apply_override(j, "system.beta=0.03");
  apply_override(j, "system.detector_atoms.0.position=[0,3,0]");
  apply_override(j, "scenario=toy");
  const auto c = config_from_json(j);
  CHECK(c.system.beta == 0.03);
  CHECK(c.system.detector_atoms[0].position == Vec3(0.0, 3.0, 0.0));
  CHECK(c.scenario == Scenario::ToyDynamics);
  CHECK_THROWS_AS(apply_override(j, "system.beta"), InvalidInput);
  CHECK_THROWS_AS(apply_override(j, "system.detector_atoms.x=1"), InvalidInput);
}

TEST_CASE("structural checks") {
  RunConfig c;
  c.scenario = Scenario::Sweep;
  CHECK_FALSE(check_config(c).empty());
  c.sweep = SweepSpec{"n_modes", {}};
  CHECK(check_config(c).empty());
  c.sweep->parameter = "beta";
  CHECK_FALSE(check_config(c).empty());
  c.scenario = Scenario::SingleDetector;
  c.sweep.reset();
  CHECK_FALSE(check_config(c).empty());
}

TEST_CASE("shell with no atoms leaves the rate unchanged") {
  const auto dir = scratch("shell0");
  std::ostringstream err;
  REQUIRE(run(quick_shell(dir), err) == kOk);
  const auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("results").at("u") == 1.0);
  CHECK(summary.at("schema_version") == kSchemaVersion);
  CHECK(summary.at("normalization").contains("probes"));
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(fs::exists(dir / "report.txt"));
}

TEST_CASE("identical config and seed give identical bytes") {
  const auto dir = scratch("repro");
  auto c = quick_shell(dir);
  c.shell.n_atoms = 10;
  std::ostringstream err;
  REQUIRE(run(c, err) == kOk);
  const auto csv = slurp(dir / "results.csv"), summary = slurp(dir / "summary.json");
  const auto report = slurp(dir / "report.txt");
  REQUIRE(run(c, err) == kOk);
  CHECK(slurp(dir / "results.csv") == csv);
  CHECK(slurp(dir / "summary.json") == summary);
  CHECK(slurp(dir / "report.txt") == report);
  c.seed = 2;
  REQUIRE(run(c, err) == kOk);
  CHECK(slurp(dir / "results.csv") != csv);
}

TEST_CASE("validation failures exit with 1 and name the invariant") {
  auto c = quick_shell(scratch("invalid"));
  c.system.omega_i = 1.5;
  std::ostringstream err;
  CHECK(run(c, err) == kValidation);
  const auto j = json::parse(err.str());
  CHECK(j.at("error").at("exit_code") == 1);
  CHECK(j.at("error").at("message").get<std::string>().find("omega_i < omega0") != std::string::npos);
}

TEST_CASE("unwritable output exits with 3") {
  const auto blocker = scratch("blocker");
  fs::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "file";
  auto c = quick_shell(blocker / "sub");
  std::ostringstream err;
  CHECK(run(c, err) == kIo);
  CHECK(json::parse(err.str()).at("error").at("kind") == "io");
}

TEST_CASE("empty sweep writes header-only files") {
  const auto dir = scratch("empty_sweep");
  RunConfig c = with_detector();
  c.scenario = Scenario::Sweep;
  c.sweep = SweepSpec{"beta", {}};
  c.output.dir = dir.string();
  std::ostringstream err;
  REQUIRE(run(c, err) == kOk);
  CHECK(slurp(dir / "plotdata" / "sweep.dat") == "# beta fitted_rate analytic_rate\n");
  const auto csv = slurp(dir / "results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
}

TEST_CASE("failed sweep points keep their row") {
  RunConfig c = with_detector();
  c.scenario = Scenario::Sweep;
  c.sweep = SweepSpec{"beta", {-1.0, -2.0}};
  c.jobs = 2;
  const auto r = run_sweep(c);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].value == -1.0);
  CHECK(r.rows[1].value == -2.0);
  CHECK(r.rows[0].error.find("beta >= 0") != std::string::npos);
  CHECK_FALSE(r.rows[1].fitted_rate.has_value());
  std::ostringstream os;
  write_sweep_csv(r, os);
  const std::string csv = os.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("trajectory outputs") {
  dynamics::Trajectory t;
  t.times = {0.0, 1.0, 2.0};
  t.a0 = {1.0, cplx(0.5, 0.5), cplx(0.0, 0.5)};
  t.survival = {1.0, 0.5, 0.25};
  t.norm_drift = {0.0, 0.0, 1e-12};
  std::ostringstream os;
  write_trajectory_csv(t, os);
  CHECK(os.str().rfind("t,re_a0,im_a0,survival,norm\n0,1,0,1,1\n", 0) == 0);

  const auto dir = scratch("plot");
  fs::create_directories(dir);
  emit_plot_data(t, 0.5, (dir / "traj.dat").string());
  std::istringstream in(slurp(dir / "traj.dat"));
  std::string header;
  std::getline(in, header);
  CHECK(header == "# t survival reference");
  double tt, p, ref;
  int rows = 0;
  while (in >> tt >> p >> ref) {
    CHECK(ref == rel(std::exp(-0.5 * tt), 1e-15));
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
