#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "watched/config.hpp"
#include "watched/dynamics.hpp"

namespace watched::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

struct SweepRow {
  double value = 0.0;
  std::optional<double> fitted_rate;
  std::optional<double> rate_stderr;
  std::optional<double> vacuum_rate;
  std::optional<double> analytic_rate;  // gamma * U of the closed form for this point
  std::optional<double> u_discrete;
  std::optional<double> u_general;
  std::optional<double> u_far_field;
  std::optional<double> u_near_field;
  std::optional<double> u_oracle;
  std::optional<double> route_disagreement;
  std::string error;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
};

// Runs every sweep point; rows keep the order of the values.
SweepResult run_sweep(const RunConfig& config);

// Executes the configured scenario and writes results.csv, summary.json,
// report.txt and plotdata/*.dat under config.output.dir. Errors are reported
// as one JSON object on `err`; the return value is an ExitCode.
int run(const RunConfig& config, std::ostream& err);

// Plot files: one header line, whitespace-delimited columns.
void emit_plot_data(const dynamics::Trajectory& traj, double reference_rate, const std::string& path);
void emit_plot_data(const SweepResult& sweep, const std::string& path);

// Trajectory CSV with columns t,re_a0,im_a0,survival,norm.
void write_trajectory_csv(const dynamics::Trajectory& traj, std::ostream& out);
void write_sweep_csv(const SweepResult& sweep, std::ostream& out);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace watched::cli
