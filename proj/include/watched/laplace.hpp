#pragma once

#include <functional>
#include <vector>

#include "watched/model.hpp"

namespace watched::laplace {

using Transform = std::function<cplx(cplx)>;

enum class Method { Bromwich, Talbot };

struct ContourSpec {
  Method method = Method::Bromwich;
  // Bromwich: line Re s = a / (2t), trapezoid step pi / t, Euler-accelerated
  // tail. The discretization error is about exp(-a).
  double a = 22.0;
  // Largest |Im| of the singularities of F; the explicit part of the sum
  // covers tail_factor times this before acceleration takes over.
  double bandwidth = 4.0;
  double tail_factor = 2.0;
  int min_terms = 40;
  int euler_terms = 15;
  // Fixed Talbot: 2M - 1 nodes on the deformed contour.
  int talbot_m = 20;
  // Acceptable two-resolution disagreement.
  double tolerance = 1e-7;
  bool throw_on_unconverged = true;
  bool parallel = true;

  bool operator==(const ContourSpec&) const = default;
};

struct InversionResult {
  std::vector<cplx> values;
  std::vector<double> error_estimate;
  double max_error_estimate = 0.0;
};

// f(t) from F(s) at each t > 0. The estimate compares a second run at a
// higher resolution; above spec.tolerance it throws NumericalError unless
// throw_on_unconverged is false.
InversionResult invert_laplace(const Transform& f, const std::vector<double>& t, const ContourSpec& spec = {});

// Single evaluation at one resolution, for callers that manage their own
// checks.
cplx bromwich_euler(const Transform& f, double t, double a, int n_terms, int euler_terms);
cplx fixed_talbot(const Transform& f, double t, int m);

}  // namespace watched::laplace
