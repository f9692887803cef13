#include "doctest.h"

#include "approx.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "watched/discretize.hpp"
#include "watched/errors.hpp"
#include "watched/kernels.hpp"
#include "watched/resolvent.hpp"

using namespace watched;
using std::numbers::pi;

namespace {

GridSpec grid(int n, double t_max = 300.0) {
  GridSpec g;
  g.n_modes = n;
  g.t_max = t_max;
  return g;
}

// Re of the continuum K at s = -i omega0 + g for the radial density.
double continuum_re_k(double gamma, double g, double omega_cut) {
  auto f = [&](double w) { return gamma / (2.0 * pi) * w * w * w * g / (g * g + (w - 1.0) * (w - 1.0)); };
  return oracle::integrate(f, 0.0, 1.0, 1e-15) + oracle::integrate(f, 1.0, omega_cut, 1e-15);
}

}  // namespace

TEST_CASE("radial vacuum satisfies the sum rule") {
  PhysicalSystem s;
  const auto m = build_radial_vacuum(s, grid(400));
  CHECK(m.n_modes() == 400);
  CHECK(m.kind == ModelKind::Radial1D);
  CHECK(sum_rule_density(m) == rel(s.gamma / 2, 0.01));
  CHECK(m.recurrence_time >= 1.5 * 300.0);
}

TEST_CASE("uncoupled atom gives zero couplings") {
  PhysicalSystem s;
  s.gamma = 0.0;
  const auto m = build_radial_vacuum(s, grid(100, 50.0));
  for (const auto& a : m.mode_alpha) CHECK(a == cplx(0.0));
}

TEST_CASE("coarse grids are refused") {
  PhysicalSystem s;
  CHECK_THROWS_AS(build_radial_vacuum(s, grid(40)), InvalidInput);
  CHECK_THROWS_AS(build_radial_vacuum(s, grid(100, 300.0)), InvalidInput);
  GridSpec g = grid(400);
  g.omega_cut = 1.5;
  CHECK_THROWS_AS(build_radial_vacuum(s, g), InvalidInput);
  s.omega_i = 1.5;
  CHECK_THROWS_AS(build_radial_vacuum(s, grid(400)), InvalidInput);
}

TEST_CASE("every builder enforces t_rec >= 1.5 t_max") {
  PhysicalSystem s;
  const auto m = build_radial_vacuum(s, grid(200, 100.0));
  CHECK_THROWS_AS(build_radial_vacuum(s, grid(200, m.recurrence_time / 1.4)), InvalidInput);
  CHECK_NOTHROW(build_radial_vacuum(s, grid(200, m.recurrence_time / 1.6)));

  ToySpec toy;
  toy.n_modes = 100;
  toy.t_max = 1e4;
  CHECK_THROWS_AS(build_scalar_toy(toy), InvalidInput);

  GridSpec g = grid(40, 1e4);
  g.n_theta = 2;
  CHECK_THROWS_AS(build_full_3d(s, g), InvalidInput);
}

TEST_CASE("recurrence time from the widest gap near omega0") {
  // cells touching the window count, so the 1.1 -> 1.3 gap is the widest
  CHECK(recurrence_time({0.9, 0.95, 1.0, 1.1, 1.3}, 1.0, 0.1) == rel(2 * pi / 0.2, 1e-15));
  CHECK(std::isinf(recurrence_time({0.5, 2.0}, 1.0, 0.1)) == false);
  CHECK(std::isinf(recurrence_time({1.0}, 1.0, 0.1)));
}

TEST_CASE("discrete K converges to the continuum at least linearly") {
  PhysicalSystem s;
  const double g = s.gamma;
  const double exact = continuum_re_k(s.gamma, g, 4.0);
  const cplx probe(g, -1.0);
  double prev = 0.0;
  for (int n : {200, 400, 800}) {
    const auto m = build_radial_vacuum(s, grid(n, 50.0));
    const double dev = std::abs(resolvent::k_discrete(probe, m).real() - exact);
    if (n > 200) CHECK((dev <= 0.5 * prev || dev < 1e-14));
    prev = dev;
  }
  // At a probe distance of gamma the omega^3 tails of the Lorentzian lift
  // the continuum value itself about 6% above gamma / 2.
  CHECK(exact == rel(s.gamma / 2, 0.07));
  CHECK(exact > 1.05 * s.gamma / 2);
}

TEST_CASE("Full3D without detectors has the radial K") {
  PhysicalSystem s;
  GridSpec g = grid(120, 100.0);
  g.n_theta = 6;
  g.n_phi = 4;
  const auto full = build_full_3d(s, g);
  const auto radial = build_radial_vacuum(s, g);
  CHECK(full.n_modes() == 120u * 6u * 4u * 2u);
  CHECK(full.n_atoms() == 0);
  CHECK(full.state_size() == 1 + full.n_modes());
  for (cplx sv : {cplx(0.01, -1.0), cplx(0.3, 0.2), cplx(1.0, -2.5)}) {
    const cplx a = resolvent::k_discrete(sv, full), b = resolvent::k_discrete(sv, radial);
    CHECK(std::abs(a - b) < 1e-12 * std::abs(b));
  }
}

TEST_CASE("Full3D polarization vectors are transverse and complete") {
  PhysicalSystem s;
  GridSpec g = grid(60, 50.0);
  const auto m = build_full_3d(s, g);
  for (std::size_t k = 0; k + 1 < m.n_modes(); k += 2) {
    const Vec3 &e1 = m.mode_polarization[k], &e2 = m.mode_polarization[k + 1], &kh = m.mode_k_hat[k];
    CHECK(std::abs(e1.dot(kh)) < 1e-14);
    CHECK(std::abs(e1.dot(e2)) < 1e-14);
    const Eigen::Matrix3d proj = e1 * e1.transpose() + e2 * e2.transpose() + kh * kh.transpose();
    CHECK((proj - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  }
}

TEST_CASE("factorized detector couplings match direct evaluation") {
  PhysicalSystem s;
  DetectorAtom a, b;
  a.position = Vec3(1.3, 0.0, 0.0);
  b.position = Vec3(0.2, -2.0, 0.7);
  b.dipole_dir = Vec3(1.0, 1.0, 0.0).normalized();
  b.mu_c_scale = 0.6;
  s.detector_atoms = {a, b};
  GridSpec g = grid(60, 50.0);
  g.n_channels = 40;
  const auto m = build_full_3d(s, g);
  CHECK(m.n_atoms() == 2);
  CHECK(m.n_channels() == 40);
  CHECK(factorization_spot_check(m, s, 2000, 3) <= 1e-14);
}

TEST_CASE("detector at the origin sees the local field kernel") {
  PhysicalSystem s;
  DetectorAtom d;
  s.detector_atoms = {d};
  GridSpec g = grid(400, 50.0);
  g.n_theta = 6;
  g.n_phi = 4;
  const auto m = build_full_3d(s, g);
  const auto sums = kernels::discrete_sums_serial(m, cplx(s.gamma, -1.0));
  // Polarization and solid angle give (8 pi / 3) p_a.p_d, so per unit mu_a
  // the local kernel equals K / mu_a^2; both tend to 2/3 as the probe
  // approaches the real axis.
  CHECK(sums.ja[0].real() / m.mu_a == rel(sums.k.real() / (m.mu_a * m.mu_a), 1e-12));
  const auto near = kernels::discrete_sums_serial(m, cplx(1e-3, -1.0));
  CHECK(near.ja[0].real() / m.mu_a == rel(2.0 / 3.0, 0.02));
  CHECK(std::abs(sums.ja[0] - sums.jb[0]) < 1e-12);
  // discrete L at the pole: pi mu_c^2 rho0
  CHECK(sums.l.real() == rel(pi * m.mu_c * m.mu_c, 0.03));
}

TEST_CASE("scalar toy") {
  ToySpec spec;
  const auto m = build_scalar_toy(spec);
  CHECK(m.kind == ModelKind::ScalarToy);
  CHECK(m.n_atoms() == 1);
  CHECK(sum_rule_density(m) == rel(spec.gamma / 2, 0.01));

  for (cplx sv : {cplx(0.01, -1.0), cplx(0.2, 0.7), cplx(2.0, -0.1)}) {
    const cplx k = resolvent::k_discrete(sv, m);
    CHECK(std::abs(resolvent::k_discrete(-std::conj(sv), m) + std::conj(k)) <= 1e-15 * std::abs(k));
  }

  spec.beta = 0.0;
  const auto quiet = build_scalar_toy(spec);
  for (double mu : quiet.channel_mu) CHECK(mu == 0.0);
  const cplx probe(0.01, -1.0);
  CHECK(std::abs(resolvent::self_energy(probe, quiet) - resolvent::k_discrete(probe, quiet)) <
        1e-15 * std::abs(resolvent::k_discrete(probe, quiet)));

  spec.band_lo = 1.2;
  CHECK_THROWS_AS(build_scalar_toy(spec), InvalidInput);
}

TEST_CASE("model CSV dump") {
  ToySpec spec;
  spec.n_modes = 60;
  spec.n_channels = 10;
  spec.t_max = 50;
  const auto m = build_scalar_toy(spec);
  std::ostringstream modes, channels;
  write_model_csv(m, modes, channels);
  std::string header;
  std::istringstream in(modes.str());
  std::getline(in, header);
  CHECK(header == "k,omega,re_alpha,im_alpha,weight,re_f0,im_f0");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 60);
  CHECK(channels.str().rfind("c,omega,mu_eff\n", 0) == 0);
  CHECK(std::string(to_string(ModelKind::Full3D)) == "full3d");
}
