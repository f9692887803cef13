#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "watched/analytic.hpp"
#include "watched/discretize.hpp"
#include "watched/dynamics.hpp"
#include "watched/laplace.hpp"
#include "watched/model.hpp"

namespace watched::cli {

inline constexpr int kSchemaVersion = 1;

enum class Scenario { Vacuum, SingleDetector, Shell, ToyDynamics, RouteCompare, Sweep };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct FitSpec {
  double t_lo = 0.0;  // 0: automatic
  double t_hi = 0.0;  // 0: end of the horizon

  bool operator==(const FitSpec&) const = default;
};

struct ShellSpec {
  std::size_t n_atoms = 100;
  double radius_z = 1.5707963267948966;
  double beta = 0.01;
  std::size_t mc_samples = 10000;
  std::size_t l2_mc_samples = 1000000;
  int l2_order = 8;

  bool operator==(const ShellSpec&) const = default;
};

struct RouteSpec {
  ModelKind model = ModelKind::ScalarToy;
  std::size_t n_times = 40;
  double horizon_fraction = 0.8;  // of the recurrence time

  bool operator==(const RouteSpec&) const = default;
};

struct SweepSpec {
  std::string parameter;  // beta, r, n_atoms or n_modes
  std::vector<double> values;

  bool operator==(const SweepSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "out";
  bool plot_data = true;
  bool model_csv = false;

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  Scenario scenario = Scenario::Vacuum;
  PhysicalSystem system;
  GridSpec grid;
  ToySpec toy;
  dynamics::SolverSpec solver;
  laplace::ContourSpec contour;
  analytic::Thresholds thresholds;
  FitSpec fit;
  ShellSpec shell;
  RouteSpec route;
  std::optional<SweepSpec> sweep;
  OutputSpec output;
  std::uint64_t seed = 1;
  int jobs = 1;

  bool operator==(const RunConfig&) const = default;
};

// Throws InvalidInput naming the offending key.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

RunConfig load_config(const std::string& path);

// Applies KEY=VALUE with a dotted key (array elements by index). VALUE is
// parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Structural checks beyond the physical invariants: scenario/sweep pairing
// and scenario prerequisites. Returns the list of problems.
std::vector<std::string> check_config(const RunConfig& config);

}  // namespace watched::cli
