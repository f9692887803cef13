#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace watched::ode {

using State = Eigen::VectorXcd;
using Rhs = std::function<void(double t, const State& y, State& dy)>;
// Called once per requested output time, in order.
using Observer = std::function<void(std::size_t index, double t, const State& y)>;

struct Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: pick automatically
  double h_min = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

// Dormand-Prince 5(4) with the fourth-order continuous extension. t_out must
// be non-decreasing and start at or after t0. Throws NumericalError on
// step-size underflow or when max_steps is exhausted.
Stats dopri5(const Rhs& f, State y, double t0, const std::vector<double>& t_out, const Options& opt,
             const Observer& observe);

}  // namespace watched::ode
