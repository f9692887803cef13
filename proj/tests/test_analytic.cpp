#include "doctest.h"

#include "approx.hpp"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "watched/analytic.hpp"
#include "watched/errors.hpp"

using namespace watched;
using namespace watched::analytic;
using std::numbers::pi;

namespace {

geometry::DipoleGeometry broadside(double z) {
  geometry::DipoleGeometry g;
  g.p_a = g.p_d = Vec3::UnitZ();
  g.r_hat = Vec3::UnitX();
  g.z = z;
  return g;
}

DetectorAtom at(const Vec3& pos, const Vec3& dip = Vec3::UnitZ()) {
  DetectorAtom d;
  d.position = pos;
  d.dipole_dir = dip;
  return d;
}

}  // namespace

TEST_CASE("rate and beta helpers") {
  CHECK(einstein_a(1.0, 0.0) == 0.0);
  CHECK(einstein_a(1.0, 0.05) == rel(3.3333333e-3, 1e-6));
  CHECK(beta_param(1.0, 0.0, 1.0) == 0.0);
  CHECK(beta_param(1.0, 0.1, 1.0) == rel(2.0944e-2, 1e-4));
  CHECK(beta_param(1.0, 0.2, 1.0) == rel(4.0 * beta_param(1.0, 0.1, 1.0), 1e-15));
  CHECK(einstein_a(1.0, mu_a_from_gamma(1.0, 0.01)) == rel(0.01, 1e-15));
  CHECK(beta_param(2.0, mu_c_from_beta(2.0, 0.07, 0.5), 0.5) == rel(0.07, 1e-15));
}

TEST_CASE("reduction_single examples") {
  for (double z : {0.0, 0.05, 1.0, 10.0}) {
    const auto r = reduction_single(broadside(z), 0.0);
    CHECK(r.u_general == 1.0);
    CHECK(r.u_oracle == 1.0);
    CHECK(r.u_far_field == 1.0);
    CHECK(r.u_near_field == 1.0);
  }
  const auto r = reduction_single(broadside(pi / 2), 0.1);
  CHECK(r.l == 1.0);
  CHECK(r.u_far_field == rel(0.908811, 1e-6));
  CHECK(r.u_general == rel(1.0 - 9.0 * 0.1 * r.d_printed * r.d_printed / (64 * pi * pi), 1e-15));
}

TEST_CASE("far-field reduction is exactly one at the nodes") {
  for (int n = 1; n <= 20; ++n) {
    const double z = n * pi;
    CHECK(std::abs(geometry::s_func(z)) < 1e-15);
    CHECK(reduction_single(broadside(z), 0.3).u_far_field == rel(1.0, 1e-28));
  }
}

TEST_CASE("far-field reduction is non-increasing in beta") {
  double prev = 2.0;
  for (double beta = 0.0; beta <= 1.0; beta += 0.05) {
    const double u = reduction_single(broadside(2.3), beta).u_far_field;
    CHECK(u <= prev);
    prev = u;
  }
}

TEST_CASE("applicability flags follow the thresholds") {
  CHECK(reduction_single(broadside(0.05), 0.1).near_field_applicable);
  CHECK_FALSE(reduction_single(broadside(0.05), 0.1).far_field_applicable);
  CHECK(reduction_single(broadside(10.0), 0.1).far_field_applicable);
  Thresholds th;
  th.far_field_z = 20.0;
  CHECK_FALSE(reduction_single(broadside(10.0), 0.1, th).far_field_applicable);
  const auto r = reduction_single(broadside(0.05), 0.1);
  CHECK(r.discrepancy >= std::abs(r.u_general - r.u_near_field));
}

TEST_CASE("quadrature-kernel variant far from the atom approaches the far-field formula") {
  // 9 beta (4 pi l S)^2 / 64 pi^2 = (9/4) beta l^2 S^2
  const auto r = reduction_single(broadside(60.5), 0.2);
  CHECK(1.0 - r.u_oracle == rel(1.0 - r.u_far_field, 0.05));
}

TEST_CASE("reduction_multi") {
  const Vec3 pa = Vec3::UnitZ();
  CHECK(reduction_multi({}, pa, 0.1).u == 1.0);

  const auto one = at(Vec3(2.0, 0.0, 0.0));
  const auto single = reduction_single(geometry::DipoleGeometry::from_detector(pa, one), 0.1);
  CHECK(reduction_multi({one}, pa, 0.1).u == single.u_far_field);

  const double d1 = 1.0 - reduction_multi({one}, pa, 0.1).u;
  const double d2 = 1.0 - reduction_multi({one, at(Vec3(0.0, 2.0, 0.0))}, pa, 0.1).u;
  CHECK(d2 == rel(2.0 * d1, 1e-15));

  CHECK_THROWS_AS(reduction_multi({at(Vec3::Zero())}, pa, 0.1), InvalidInput);
}

TEST_CASE("negative reduction is kept and flagged") {
  std::vector<DetectorAtom> atoms(50, at(Vec3(pi / 2, 0.0, 0.0)));
  const auto r = reduction_multi(atoms, Vec3::UnitZ(), 0.1);
  CHECK(r.u < 0.0);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("reduction_shell") {
  CHECK(reduction_shell(0, 1.0, 0.3) == 1.0);
  CHECK(reduction_shell(100, pi / 2, 0.01) == rel(1.0 - (9.0 / 14.0) * 4.0 / (pi * pi), 1e-15));
  CHECK(reduction_shell(100, pi / 2, 0.01) == rel(0.73946, 1e-5));
}

TEST_CASE("shell Monte Carlo follows the exact orientation average") {
  const std::size_t n = 100;
  const double z = pi / 2, beta = 0.01;
  const auto est = reduction_shell_mc(n, z, beta, 4000, 5);
  const double s = geometry::s_func(z);
  const double predicted = 1.0 - 2.25 * beta * n * oracle::kL2Average * s * s;
  CHECK(std::abs(est.mean - predicted) < 3.0 * est.std_error);
  CHECK(est.std_error > 0.0);
  CHECK(reduction_shell_mc(n, z, beta, 4000, 5).mean == est.mean);
  CHECK(reduction_shell_mc(0, z, beta, 10, 5).mean == 1.0);
}

TEST_CASE("survival_ww") {
  CHECK(survival_ww(0.0, 0.01, 0.7) == 1.0);
  CHECK(survival_ww(100.0, 0.01, 1.0) == rel(std::exp(-1.0), 1e-15));
  CHECK(survival_ww(200.0, 0.01, 0.5) == rel(std::exp(-1.0), 1e-15));
  for (double t1 : {0.0, 3.0, 57.0})
    for (double t2 : {1.0, 40.0, 123.0}) {
      const double lhs = survival_ww(t1 + t2, 0.013, 0.83);
      const double rhs = survival_ww(t1, 0.013, 0.83) * survival_ww(t2, 0.013, 0.83);
      CHECK(std::abs(lhs - rhs) < 1e-14);
    }
}

TEST_CASE("magnitude checks") {
  PhysicalSystem s;
  auto r = magnitude_checks(s);
  CHECK(r.li == rel(s.beta, 1e-14));
  CHECK(r.self_energy == rel(s.gamma / 2, 1e-14));
  CHECK(r.li_small);
  CHECK(r.self_energy_small);
  s.beta = 0.0;
  CHECK(magnitude_checks(s).li == 0.0);
  s.beta = 0.5;
  CHECK_FALSE(magnitude_checks(s).li_small);
  CHECK_FALSE(magnitude_checks(s, 0.01).li_small);
}
