#include "doctest.h"

#include <cmath>

#include "watched/errors.hpp"
#include "watched/model.hpp"
#include "watched/ode.hpp"

using namespace watched;

TEST_CASE("harmonic oscillator as a complex rotation") {
  const ode::Rhs f = [](double, const ode::State& y, ode::State& dy) { dy = cplx(0.0, -1.0) * y; };
  ode::State y0(1);
  y0(0) = 1.0;
  std::vector<double> t_out;
  for (int i = 0; i <= 100; ++i) t_out.push_back(0.37 * i);
  ode::Options opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-13;
  double worst = 0.0;
  std::size_t calls = 0;
  const auto stats = ode::dopri5(f, y0, 0.0, t_out, opt, [&](std::size_t i, double t, const ode::State& y) {
    CHECK(i == calls++);
    CHECK(t == t_out[i]);
    worst = std::max(worst, std::abs(y(0) - std::exp(cplx(0.0, -t))));
  });
  CHECK(calls == t_out.size());
  CHECK(worst < 1e-8);
  CHECK(stats.accepted > 0);
  CHECK(stats.rhs_evals >= 6 * stats.accepted);
}

TEST_CASE("dense output between steps keeps the step error order") {
  const ode::Rhs f = [](double t, const ode::State& y, ode::State& dy) { dy = -t * y; };
  ode::State y0(2);
  y0 << 1.0, cplx(0.0, 2.0);
  std::vector<double> t_out;
  for (int i = 0; i <= 300; ++i) t_out.push_back(0.01 * i);
  double worst = 0.0;
  ode::dopri5(f, y0, 0.0, t_out, {}, [&](std::size_t, double t, const ode::State& y) {
    const double e = std::exp(-0.5 * t * t);
    worst = std::max(worst, std::abs(y(0) - e) + std::abs(y(1) - cplx(0.0, 2.0 * e)));
  });
  CHECK(worst < 1e-7);
}

TEST_CASE("outputs at t0 and repeated times") {
  const ode::Rhs f = [](double, const ode::State& y, ode::State& dy) { dy = -y; };
  ode::State y0(1);
  y0(0) = 1.0;
  std::vector<cplx> got;
  ode::dopri5(f, y0, 0.0, {0.0, 1.0, 1.0}, {}, [&](std::size_t, double, const ode::State& y) { got.push_back(y(0)); });
  REQUIRE(got.size() == 3);
  CHECK(got[0] == cplx(1.0));
  CHECK(got[1] == got[2]);
  CHECK(std::abs(got[1] - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("blow-up triggers step-size underflow") {
  const ode::Rhs f = [](double, const ode::State& y, ode::State& dy) { dy = y.cwiseProduct(y); };
  ode::State y0(1);
  y0(0) = 1.0;
  CHECK_THROWS_AS(ode::dopri5(f, y0, 0.0, {2.0}, {}, [](std::size_t, double, const ode::State&) {}), NumericalError);
}

TEST_CASE("step budget is enforced") {
  const ode::Rhs f = [](double, const ode::State& y, ode::State& dy) { dy = cplx(0.0, -50.0) * y; };
  ode::State y0(1);
  y0(0) = 1.0;
  ode::Options opt;
  opt.max_steps = 10;
  CHECK_THROWS_AS(ode::dopri5(f, y0, 0.0, {100.0}, opt, [](std::size_t, double, const ode::State&) {}),
                  NumericalError);
}
