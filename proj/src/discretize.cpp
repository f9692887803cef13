#include "watched/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "watched/analytic.hpp"
#include "watched/errors.hpp"
#include "watched/geometry.hpp"
#include "watched/quadrature.hpp"
#include "watched/rng.hpp"

namespace watched {

using std::numbers::pi;

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Radial1D:
      return "radial1d";
    case ModelKind::Full3D:
      return "full3d";
    case ModelKind::ScalarToy:
      return "scalar_toy";
  }
  return "unknown";
}

double recurrence_time(const std::vector<double>& omega, double omega0, double window) {
  double gap = 0.0;
  for (std::size_t i = 1; i < omega.size(); ++i) {
    const double lo = omega[i - 1], hi = omega[i];
    if (hi < omega0 - window || lo > omega0 + window) continue;
    gap = std::max(gap, hi - lo);
  }
  if (gap <= 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * pi / gap;
}

namespace {

void check_recurrence(double t_rec, double t_max, const char* who) {
  if (t_max > 0.0 && t_rec < 1.5 * t_max) {
    std::ostringstream os;
    os << who << ": recurrence time " << t_rec << " < 1.5 * t_max = " << 1.5 * t_max << "; refine the grid";
    throw InvalidInput(os.str());
  }
}

// An uncoupled atom (gamma = 0) is accepted so that decoupled reference
// models can be built from the same system.
void require_usable(const PhysicalSystem& system, const char* who) {
  const auto report = validate(system);
  for (const auto& v : report.violations) {
    if (system.gamma == 0.0 && v == "gamma > 0") continue;
    throw InvalidInput(std::string(who) + ": invalid system: " + v);
  }
}

// Channel grid shared by every detector atom: Gauss-Legendre on
// [omega_i, omega_cut_c] split at omega0, weights carrying rho.
void add_channels(DiscreteModel& m, const PhysicalSystem& system, int n_channels) {
  if (n_channels < 2) throw InvalidInput("n_channels must be >= 2");
  const auto rule = quad::split_panels(n_channels, system.omega_i, system.omega0, system.dos.omega_cut_c);
  m.mu_c = analytic::mu_c_from_beta(system.omega0, system.beta, system.dos.normalization);
  m.channel_omega = rule.nodes;
  m.channel_weight = rule.weights;
  m.channel_mu.resize(rule.size());
  for (std::size_t c = 0; c < rule.size(); ++c) {
    const double rho = system.dos.density(rule.nodes[c], system.omega0);
    m.channel_mu[c] = m.mu_c * std::sqrt(std::max(0.0, rho) * rule.weights[c]);
  }
}

}  // namespace

DiscreteModel build_radial_vacuum(const PhysicalSystem& system, const GridSpec& grid) {
  require_usable(system, "build_radial_vacuum");
  if (grid.n_modes < 50) throw InvalidInput("build_radial_vacuum: n_modes must be >= 50");
  if (grid.omega_cut < 2.0 * system.omega0) throw InvalidInput("build_radial_vacuum: omega_cut must be >= 2 omega0");

  const auto rule = quad::split_panels(grid.n_modes, 0.0, system.omega0, grid.omega_cut);
  DiscreteModel m;
  m.kind = ModelKind::Radial1D;
  m.omega0 = system.omega0;
  m.mu_a = system.mu_a();
  m.mode_omega = rule.nodes;
  m.mode_weight = rule.weights;
  m.mode_cell = quad::weight_cells(rule, 0.0);
  m.mode_alpha.resize(rule.size());
  const double w03 = std::pow(system.omega0, 3);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double w = rule.nodes[k];
    m.mode_alpha[k] = std::sqrt(system.gamma / (2.0 * pi) * w * w * w / w03 * rule.weights[k]);
  }
  m.recurrence_time = recurrence_time(m.mode_omega, system.omega0, grid.rec_window * system.omega0);

  if (system.gamma > 0.0) {
    const double density = sum_rule_density(m);
    if (std::abs(density / (0.5 * system.gamma) - 1.0) > 0.01) {
      std::ostringstream os;
      os << "build_radial_vacuum: sum rule off by " << 100.0 * (density / (0.5 * system.gamma) - 1.0)
         << "%; grid too coarse";
      throw InvalidInput(os.str());
    }
  }
  check_recurrence(m.recurrence_time, grid.t_max, "build_radial_vacuum");
  return m;
}

DiscreteModel build_full_3d(const PhysicalSystem& system, const GridSpec& grid) {
  require_usable(system, "build_full_3d");
  if (grid.n_modes < 2 || grid.n_theta < 1 || grid.n_phi < 3) throw InvalidInput("build_full_3d: grid too small");
  if (!(grid.omega_cut > system.omega0)) throw InvalidInput("build_full_3d: omega_cut must exceed omega0");

  const auto radial = quad::split_panels(grid.n_modes, 0.0, system.omega0, grid.omega_cut);
  const auto polar = quad::gauss_legendre(grid.n_theta);
  const double dphi = 2.0 * pi / grid.n_phi;

  // Polar axis along the first detector's direction, so its phase varies
  // only with cos(theta).
  Vec3 axis = Vec3::UnitZ();
  if (!system.detector_atoms.empty() && system.detector_atoms.front().position.norm() > 0.0)
    axis = system.detector_atoms.front().position.normalized();
  const auto frame = geometry::polarization_basis(axis);

  DiscreteModel m;
  m.kind = ModelKind::Full3D;
  m.omega0 = system.omega0;
  m.mu_a = system.mu_a();
  const std::size_t n_total = radial.size() * polar.size() * grid.n_phi * 2;
  m.mode_omega.reserve(n_total);
  m.mode_alpha.reserve(n_total);
  m.mode_k_hat.reserve(n_total);
  m.mode_polarization.reserve(n_total);
  m.mode_weight.reserve(n_total);
  const std::size_t n_atoms = system.detector_atoms.size();
  m.detector_factor.assign(n_atoms, {});
  for (auto& f : m.detector_factor) f.reserve(n_total);

  const cplx minus_i(0.0, -1.0);
  for (std::size_t r = 0; r < radial.size(); ++r) {
    const double w = radial.nodes[r];
    for (std::size_t t = 0; t < polar.size(); ++t) {
      const double xi = polar.nodes[t];
      const double sin_t = std::sqrt(std::max(0.0, 1.0 - xi * xi));
      for (int p = 0; p < grid.n_phi; ++p) {
        const double phi = dphi * p;
        const Vec3 k_hat = xi * axis + sin_t * (std::cos(phi) * frame.e1 + std::sin(phi) * frame.e2);
        const auto pol = geometry::polarization_basis(k_hat);
        const double weight = radial.weights[r] * polar.weights[t] * dphi;
        const double amp = std::sqrt(w * w * w * weight / (4.0 * pi * pi));
        for (const Vec3& eps : {pol.e1, pol.e2}) {
          m.mode_omega.push_back(w);
          m.mode_k_hat.push_back(k_hat);
          m.mode_polarization.push_back(eps);
          m.mode_weight.push_back(weight);
          m.mode_alpha.push_back(minus_i * m.mu_a * system.atom.dipole_dir.dot(eps) * amp);
          for (std::size_t i = 0; i < n_atoms; ++i) {
            const auto& d = system.detector_atoms[i];
            const cplx phase = std::exp(cplx(0.0, w * k_hat.dot(d.position)));
            m.detector_factor[i].push_back(minus_i * d.dipole_dir.dot(eps) * amp * phase * d.mu_c_scale);
          }
        }
      }
    }
  }
  if (n_atoms > 0) add_channels(m, system, grid.n_channels);

  m.recurrence_time = recurrence_time(radial.nodes, system.omega0, grid.rec_window * system.omega0);
  check_recurrence(m.recurrence_time, grid.t_max, "build_full_3d");
  return m;
}

DiscreteModel build_scalar_toy(const ToySpec& spec) {
  if (spec.n_modes < 2) throw InvalidInput("build_scalar_toy: n_modes must be >= 2");
  if (!(spec.band_lo > 0.0 && spec.band_lo < 1.0 && spec.band_hi > 1.0))
    throw InvalidInput("build_scalar_toy: mode band must straddle omega0 = 1");
  if (!(spec.channel_lo > 0.0 && spec.channel_lo < 1.0 && spec.channel_hi > 1.0))
    throw InvalidInput("build_scalar_toy: channel band must straddle omega0 = 1");
  if (spec.gamma < 0.0 || spec.beta < 0.0) throw InvalidInput("build_scalar_toy: gamma and beta must be >= 0");

  const double omega0 = 1.0;
  const auto rule = quad::split_panels(spec.n_modes, spec.band_lo, omega0, spec.band_hi);
  DiscreteModel m;
  m.kind = ModelKind::ScalarToy;
  m.omega0 = omega0;
  // Re K at the pole is pi a^2 omega0 = gamma / 2.
  const double a = std::sqrt(spec.gamma / (2.0 * pi * omega0));
  m.mu_a = a;
  m.mode_omega = rule.nodes;
  m.mode_weight = rule.weights;
  m.mode_cell = quad::weight_cells(rule, spec.band_lo);
  m.mode_alpha.resize(rule.size());
  m.detector_factor.assign(1, std::vector<cplx>(rule.size()));
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double amp = std::sqrt(rule.nodes[k] * rule.weights[k]);
    m.mode_alpha[k] = a * amp;
    m.detector_factor[0][k] = amp * std::exp(cplx(0.0, rule.nodes[k] * spec.z));
  }

  // Flat channels with L * N at the pole equal to beta.
  const auto ch = quad::split_panels(std::max(spec.n_channels, 2), spec.channel_lo, omega0, spec.channel_hi);
  m.mu_c = std::sqrt(spec.beta / (pi * pi * omega0));
  m.channel_omega = ch.nodes;
  m.channel_weight = ch.weights;
  m.channel_mu.resize(ch.size());
  for (std::size_t c = 0; c < ch.size(); ++c) m.channel_mu[c] = m.mu_c * std::sqrt(ch.weights[c]);

  m.recurrence_time = recurrence_time(m.mode_omega, omega0, spec.rec_window * omega0);
  check_recurrence(m.recurrence_time, spec.t_max, "build_scalar_toy");
  return m;
}

double sum_rule_density(const DiscreteModel& m, double delta) {
  if (m.mode_cell.size() != m.n_modes()) throw InvalidInput("sum_rule_density: model has no frequency cells");
  const double lo = m.omega0 - 0.5 * delta, hi = m.omega0 + 0.5 * delta;
  double acc = 0.0;
  for (std::size_t k = 0; k < m.n_modes(); ++k) {
    const auto [a, b] = m.mode_cell[k];
    const double overlap = std::max(0.0, std::min(b, hi) - std::max(a, lo));
    if (overlap > 0.0) acc += std::norm(m.mode_alpha[k]) * overlap / (b - a);
  }
  return pi * acc / delta;
}

double factorization_spot_check(const DiscreteModel& m, const PhysicalSystem& system, std::size_t samples,
                                std::uint64_t seed) {
  if (m.kind != ModelKind::Full3D) throw InvalidInput("factorization_spot_check: Full3D models only");
  if (m.n_atoms() == 0 || m.n_channels() == 0) return 0.0;
  auto gen = substream(seed, "factorization_spot_check");
  std::uniform_int_distribution<std::size_t> pick_k(0, m.n_modes() - 1), pick_c(0, m.n_channels() - 1),
      pick_i(0, m.n_atoms() - 1);
  double worst = 0.0;
  for (std::size_t n = 0; n < samples; ++n) {
    const std::size_t k = pick_k(gen), c = pick_c(gen), i = pick_i(gen);
    const auto& d = system.detector_atoms[i];
    const double w = m.mode_omega[k];
    const double rho = system.dos.density(m.channel_omega[c], system.omega0);
    const cplx g = cplx(0.0, -1.0) * m.mu_c * d.mu_c_scale * std::sqrt(rho * m.channel_weight[c]) *
                   d.dipole_dir.dot(m.mode_polarization[k]) *
                   std::sqrt(w * w * w * m.mode_weight[k] / (4.0 * pi * pi)) *
                   std::exp(cplx(0.0, w * m.mode_k_hat[k].dot(d.position)));
    worst = std::max(worst, std::abs(g - m.channel_mu[c] * m.detector_factor[i][k]));
  }
  return worst;
}

void write_model_csv(const DiscreteModel& m, std::ostream& modes, std::ostream& channels) {
  modes.precision(17);
  channels.precision(17);
  modes << "k,omega,re_alpha,im_alpha,weight";
  for (std::size_t i = 0; i < m.n_atoms(); ++i) modes << ",re_f" << i << ",im_f" << i;
  modes << '\n';
  for (std::size_t k = 0; k < m.n_modes(); ++k) {
    modes << k << ',' << m.mode_omega[k] << ',' << m.mode_alpha[k].real() << ',' << m.mode_alpha[k].imag() << ','
          << (k < m.mode_weight.size() ? m.mode_weight[k] : 0.0);
    for (std::size_t i = 0; i < m.n_atoms(); ++i)
      modes << ',' << m.detector_factor[i][k].real() << ',' << m.detector_factor[i][k].imag();
    modes << '\n';
  }
  channels << "c,omega,mu_eff\n";
  for (std::size_t c = 0; c < m.n_channels(); ++c)
    channels << c << ',' << m.channel_omega[c] << ',' << m.channel_mu[c] << '\n';
}

}  // namespace watched
