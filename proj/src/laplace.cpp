#include "watched/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "watched/errors.hpp"

namespace watched::laplace {

using std::numbers::pi;

cplx bromwich_euler(const Transform& f, double t, double a, int n_terms, int euler_terms) {
  const double sigma = a / (2.0 * t);
  const double h = pi / t;
  const int total = n_terms + euler_terms;

  // Partial sums s_j of F(sigma) + sum_{k>=1} (-1)^k [F(sigma + ikh) + F(sigma - ikh)].
  std::vector<cplx> partial(total + 1);
  cplx acc = f(cplx(sigma, 0.0));
  partial[0] = acc;
  for (int k = 1; k <= total; ++k) {
    const cplx pair = f(cplx(sigma, k * h)) + f(cplx(sigma, -k * h));
    acc += (k % 2 == 0 ? 1.0 : -1.0) * pair;
    partial[k] = acc;
  }

  // Binomial average of the last euler_terms + 1 partial sums.
  cplx euler = 0.0;
  double binom = 1.0;
  const double scale = std::ldexp(1.0, -euler_terms);
  for (int j = 0; j <= euler_terms; ++j) {
    euler += binom * scale * partial[n_terms + j];
    binom = binom * (euler_terms - j) / (j + 1);
  }
  return std::exp(0.5 * a) / (2.0 * t) * euler;
}

cplx fixed_talbot(const Transform& f, double t, int m) {
  const double r = 2.0 * m / (5.0 * t);
  cplx acc = std::exp(r * t) * f(cplx(r, 0.0));
  for (int k = 1; k < m; ++k) {
    const double theta = k * pi / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const double sig = theta + (theta * cot - 1.0) * cot;
    for (double sign : {1.0, -1.0}) {
      const cplx s(r * theta * cot, sign * r * theta);
      acc += std::exp(s * t) * f(s) * cplx(1.0, sign * sig);
    }
  }
  return r / (2.0 * m) * acc;
}

namespace {

int bromwich_terms(double t, const ContourSpec& spec) {
  return spec.min_terms + static_cast<int>(std::ceil(spec.tail_factor * spec.bandwidth * t / pi));
}

std::pair<cplx, double> invert_one(const Transform& f, double t, const ContourSpec& spec) {
  if (spec.method == Method::Talbot) {
    const cplx lo = fixed_talbot(f, t, spec.talbot_m);
    const cplx hi = fixed_talbot(f, t, spec.talbot_m + spec.talbot_m / 2);
    return {hi, std::abs(hi - lo)};
  }
  const int n = bromwich_terms(t, spec);
  const cplx lo = bromwich_euler(f, t, spec.a, n, spec.euler_terms);
  const cplx hi = bromwich_euler(f, t, spec.a + 4.0, n + n / 4, spec.euler_terms + 4);
  return {hi, std::abs(hi - lo)};
}

}  // namespace

InversionResult invert_laplace(const Transform& f, const std::vector<double>& t, const ContourSpec& spec) {
  for (double ti : t)
    if (!(ti > 0.0)) throw InvalidInput("invert_laplace: times must be > 0");

  InversionResult out;
  out.values.resize(t.size());
  out.error_estimate.resize(t.size());
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(dynamic) if (spec.parallel)
  for (std::size_t i = 0; i < t.size(); ++i) {
    try {
      const auto [v, e] = invert_one(f, t[i], spec);
      out.values[i] = v;
      out.error_estimate[i] = e;
    } catch (const std::exception& ex) {
#pragma omp critical
      {
        failed = true;
        message = ex.what();
      }
    }
  }
  if (failed) throw NumericalError("invert_laplace: " + message);

  out.max_error_estimate = 0.0;
  for (double e : out.error_estimate) out.max_error_estimate = std::max(out.max_error_estimate, e);
  if (!(out.max_error_estimate <= spec.tolerance) && spec.throw_on_unconverged) {
    std::ostringstream os;
    os << "invert_laplace: two-resolution disagreement " << out.max_error_estimate << " exceeds "
       << spec.tolerance;
    throw NumericalError(os.str());
  }
  return out;
}

}  // namespace watched::laplace
