#pragma once

#include <string>
#include <vector>

#include "watched/discretize.hpp"
#include "watched/laplace.hpp"
#include "watched/ode.hpp"

namespace watched::dynamics {

struct AmplitudeState {
  cplx a0 = 1.0;
  std::vector<cplx> a_k;
  std::vector<cplx> a_c;  // channels atom by atom
  double t = 0.0;

  // The excited atom with empty field and detector in its ground state.
  static AmplitudeState initial(const DiscreteModel& model);
  ode::State to_vector() const;
  static AmplitudeState from_vector(const ode::State& y, const DiscreteModel& model, double t);
  double norm() const;
};

// Right-hand side of the amplitude equations in the lab frame. Throws
// InvalidInput if the state does not match the model.
AmplitudeState derivative(const AmplitudeState& state, const DiscreteModel& model);

struct SolverSpec {
  double rtol = 1e-9;
  double atol = 1e-12;
  bool rotating_frame = true;  // integrate in the frame rotating at omega0
  bool parallel = true;
  std::size_t n_samples = 601;  // uniform output grid on [0, t_max] when times is empty
  std::vector<double> times;

  bool operator==(const SolverSpec&) const = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<cplx> a0;  // lab frame
  std::vector<double> survival;
  std::vector<double> norm_drift;  // total norm minus one

  std::string model_kind;
  std::size_t n_modes = 0;
  std::size_t n_channels = 0;
  std::size_t n_atoms = 0;
  double recurrence_time = 0.0;
  double rtol = 0.0;
  double atol = 0.0;
  bool rotating_frame = true;
  ode::Stats stats;

  double max_norm_drift() const;
};

// Evolves the initial state to t_max. Throws InvalidInput if t_max reaches
// the model's recurrence time.
Trajectory integrate(const DiscreteModel& model, double t_max, const SolverSpec& solver = {});

struct RateFit {
  double rate = 0.0;
  double std_error = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double r_squared = 0.0;
  double intercept = 0.0;
  std::size_t samples = 0;
};

// Least squares of log P = c - rate * t on the samples inside [t_lo, t_hi].
RateFit fit_decay_rate(const Trajectory& traj, double t_lo, double t_hi);

// Fit window that skips the quadratic onset and stays inside the horizon.
std::pair<double, double> default_fit_window(double gamma_expected, double t_max);

struct RouteComparison {
  std::vector<double> times;
  std::vector<cplx> a0_ode;
  std::vector<cplx> a0_resolvent;
  double max_abs_diff = 0.0;
  double inversion_error = 0.0;
};

// ODE route against the inverse Laplace transform of the resolvent on the
// same finite model. Requires K + C <= 2000 and all times > 0.
RouteComparison compare_routes(const DiscreteModel& model, const std::vector<double>& times,
                               const SolverSpec& solver = {}, laplace::ContourSpec contour = {});

struct EarlyTime {
  double slope = 0.0;      // d log(1 - P) / d log t
  double curvature = 0.0;  // (1 - P) / t^2 at the left end
};

EarlyTime early_time_slope(const DiscreteModel& model, double t_lo = 1e-3, double t_hi = 1e-1,
                           std::size_t samples = 41);

}  // namespace watched::dynamics
