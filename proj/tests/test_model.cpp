#include "doctest.h"

#include "approx.hpp"

#include <algorithm>

#include "watched/analytic.hpp"
#include "watched/discretize.hpp"
#include "watched/model.hpp"

using namespace watched;

namespace {

bool has(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("default system is usable with an empty report") {
  PhysicalSystem s;
  const auto r = validate(s);
  CHECK(r.empty());
}

TEST_CASE("threshold above omega0 is a violation") {
  PhysicalSystem s;
  s.omega_i = 1.5;
  const auto r = validate(s);
  CHECK_FALSE(r.usable());
  CHECK(has(r.violations, "omega_i < omega0"));
}

TEST_CASE("large gamma warns about the WW regime") {
  PhysicalSystem s;
  s.gamma = 0.5;
  const auto r = validate(s);
  CHECK(has(r.warnings, "outside WW regime"));
  CHECK(has(r.violations, "gamma <= 0.1*omega0"));
}

TEST_CASE("non-unit dipoles and negative beta are violations") {
  PhysicalSystem s;
  s.atom.dipole_dir = Vec3(1.0, 1.0, 0.0);
  s.beta = -0.1;
  DetectorAtom d;
  d.dipole_dir = Vec3(0.0, 0.0, 1.0 + 1e-9);
  s.detector_atoms.push_back(d);
  const auto r = validate(s);
  CHECK(has(r.violations, "|atom.dipole_dir| = 1"));
  CHECK(has(r.violations, "|detector_atoms[0].dipole_dir| = 1"));
  CHECK(has(r.violations, "beta >= 0"));
}

TEST_CASE("unit tolerance is 1e-12") {
  CHECK(is_unit(Vec3(0.0, 0.0, 1.0 + 5e-13)));
  CHECK_FALSE(is_unit(Vec3(0.0, 0.0, 1.0 + 5e-12)));
}

TEST_CASE("validate is pure and idempotent") {
  PhysicalSystem s;
  s.gamma = 0.2;
  s.omega_i = 2.0;
  const auto a = validate(s);
  const auto b = validate(s);
  CHECK(a.violations == b.violations);
  CHECK(a.warnings == b.warnings);
}

TEST_CASE("a usable system passes through every constructor") {
  PhysicalSystem s;
  DetectorAtom d;
  d.position = Vec3(2.0, 0.0, 0.0);
  s.detector_atoms.push_back(d);
  REQUIRE(validate(s).usable());
  GridSpec g;
  g.t_max = 100.0;
  CHECK_NOTHROW(build_radial_vacuum(s, g));
  g.n_modes = 60;
  g.t_max = 50.0;
  CHECK_NOTHROW(build_full_3d(s, g));
  CHECK_NOTHROW(analytic::magnitude_checks(s));
  CHECK_NOTHROW(analytic::reduction_single(geometry::DipoleGeometry::from_detector(s.atom.dipole_dir, d), s.beta));
}

TEST_CASE("coupling magnitudes follow gamma and beta") {
  PhysicalSystem s;
  CHECK(analytic::einstein_a(s.omega0, s.mu_a()) == rel(s.gamma, 1e-14));
  DetectorAtom d;
  CHECK(analytic::beta_param(s.omega0, s.mu_c(d), s.dos.normalization) == rel(s.beta, 1e-14));
  d.mu_c_scale = 2.0;
  CHECK(s.mu_c(d) == doctest::Approx(2.0 * analytic::mu_c_from_beta(1.0, s.beta, 1.0)));
}

TEST_CASE("power-law density") {
  IonizationDos dos;
  dos.shape = DosShape::PowerLaw;
  dos.exponent = -1.5;
  dos.normalization = 2.0;
  CHECK(dos.density(1.0) == doctest::Approx(2.0));
  CHECK(dos.density(4.0) == doctest::Approx(2.0 / 8.0));
}
