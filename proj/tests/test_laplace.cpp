#include "doctest.h"

#include <cmath>

#include "watched/errors.hpp"
#include "watched/laplace.hpp"

using namespace watched;
using namespace watched::laplace;

namespace {

std::vector<double> grid() {
  std::vector<double> t;
  for (int i = 1; i <= 30; ++i) t.push_back(10.0 * i);
  t.push_back(0.05);
  t.push_back(1.0);
  return t;
}

}  // namespace

TEST_CASE("free phase") {
  const auto t = grid();
  ContourSpec spec;
  spec.bandwidth = 1.0;
  const auto r = invert_laplace([](cplx s) { return 1.0 / (s + cplx(0.0, 1.0)); }, t, spec);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(r.values[i] - std::exp(cplx(0.0, -t[i]))) < 1e-8);
    CHECK(std::abs(std::abs(r.values[i]) - 1.0) < 1e-8);
  }
  CHECK(r.max_error_estimate < spec.tolerance);
}

TEST_CASE("slow exponential") {
  const auto t = grid();
  ContourSpec spec;
  spec.bandwidth = 0.1;
  const auto r = invert_laplace([](cplx s) { return 1.0 / (s + 0.01); }, t, spec);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(r.values[i] - std::exp(-0.01 * t[i])) < 1e-8);
}

TEST_CASE("two-pole cosine") {
  const auto t = grid();
  const double w = 0.7;
  ContourSpec spec;
  spec.bandwidth = w;
  const auto r = invert_laplace([w](cplx s) { return s / (s * s + w * w); }, t, spec);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(r.values[i] - std::cos(w * t[i])) < 1e-8);
}

TEST_CASE("real-axis poles through fixed Talbot") {
  const std::vector<double> t = {0.5, 1.0, 3.0, 8.0};
  for (double ti : t) {
    const cplx v = fixed_talbot([](cplx s) { return 1.0 / (s + 0.3); }, ti, 20);
    CHECK(std::abs(v - std::exp(-0.3 * ti)) < 1e-10);
  }
  ContourSpec spec;
  spec.method = Method::Talbot;
  const auto r = invert_laplace([](cplx s) { return 1.0 / ((s + 0.2) * (s + 0.5)); }, t, spec);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(std::abs(r.values[i] - (std::exp(-0.2 * t[i]) - std::exp(-0.5 * t[i])) / 0.3) < 1e-8);
}

TEST_CASE("serial and parallel inversion are identical") {
  const auto t = grid();
  ContourSpec a, b;
  b.parallel = false;
  const auto f = [](cplx s) { return 1.0 / (s + cplx(0.01, 1.0)); };
  CHECK(invert_laplace(f, t, a).values == invert_laplace(f, t, b).values);
}

TEST_CASE("bad times and unconverged inversions") {
  CHECK_THROWS_AS(invert_laplace([](cplx s) { return 1.0 / s; }, {1.0, 0.0}), InvalidInput);
  ContourSpec spec;
  spec.bandwidth = 1.0;
  spec.min_terms = 2;
  spec.tail_factor = 0.0;
  spec.euler_terms = 1;
  spec.tolerance = 1e-14;
  // a rapidly oscillating transform the truncated sum cannot resolve
  const auto f = [](cplx s) { return 1.0 / (s + cplx(0.0, 30.0)); };
  CHECK_THROWS_AS(invert_laplace(f, {5.0}, spec), NumericalError);
  spec.throw_on_unconverged = false;
  const auto r = invert_laplace(f, {5.0}, spec);
  CHECK(r.max_error_estimate > spec.tolerance);
}
