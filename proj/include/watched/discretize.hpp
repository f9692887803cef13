#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "watched/model.hpp"

namespace watched {

enum class ModelKind { Radial1D, Full3D, ScalarToy };

const char* to_string(ModelKind kind);

struct GridSpec {
  int n_modes = 400;        // radial nodes on [0, omega_cut]
  double omega_cut = 4.0;
  int n_theta = 8;          // Full3D: Gauss-Legendre nodes in cos(theta)
  int n_phi = 4;            // Full3D: uniform azimuthal nodes
  int n_channels = 200;     // ionization channels per detector atom
  double t_max = 300.0;     // horizon the grid must support
  double rec_window = 0.1;  // half-width around omega0 used for the recurrence time

  bool operator==(const GridSpec&) const = default;
};

struct ToySpec {
  int n_modes = 400;
  double band_lo = 0.5;
  double band_hi = 1.5;
  double gamma = 0.01;
  double beta = 0.05;
  double z = 0.0;  // detector phase exp(i omega z)
  int n_channels = 200;
  double channel_lo = 0.3;
  double channel_hi = 1.7;
  double t_max = 300.0;
  double rec_window = 0.1;

  bool operator==(const ToySpec&) const = default;
};

// Finite stand-in for the photon and ionization continua. Detector-channel
// couplings factorize as mu_c_eff(c) * f(k, i); only the factors are stored.
struct DiscreteModel {
  ModelKind kind = ModelKind::Radial1D;
  double omega0 = 1.0;

  std::vector<double> mode_omega;
  std::vector<cplx> mode_alpha;

  std::vector<double> channel_omega;
  std::vector<double> channel_mu;  // mu_c_eff, shared by every detector atom

  std::vector<std::vector<cplx>> detector_factor;  // [atom][mode]

  // Full3D bookkeeping for direct evaluation of the couplings.
  std::vector<Vec3> mode_k_hat;
  std::vector<Vec3> mode_polarization;
  std::vector<double> mode_weight;  // radial (x angular) quadrature weight
  // Radial1D and ScalarToy: frequency cell [lo, hi] owned by each mode.
  std::vector<std::pair<double, double>> mode_cell;
  std::vector<double> channel_weight;
  double mu_a = 0.0;
  double mu_c = 0.0;

  double recurrence_time = 0.0;

  std::size_t n_modes() const { return mode_omega.size(); }
  std::size_t n_channels() const { return channel_omega.size(); }
  std::size_t n_atoms() const { return detector_factor.size(); }
  // a0, then modes, then channels atom by atom
  std::size_t state_size() const { return 1 + n_modes() + n_channels() * n_atoms(); }
};

DiscreteModel build_radial_vacuum(const PhysicalSystem& system, const GridSpec& grid);
DiscreteModel build_full_3d(const PhysicalSystem& system, const GridSpec& grid);
DiscreteModel build_scalar_toy(const ToySpec& spec);

// pi * sum |alpha|^2 / delta over the cells inside [omega0 - delta/2, omega0 + delta/2].
// Equals gamma/2 in the continuum limit.
double sum_rule_density(const DiscreteModel& model, double delta = 0.05);

// 2 pi / (largest mode gap within +-window of omega0).
double recurrence_time(const std::vector<double>& sorted_omega, double omega0, double window);

// Largest |g(k,c,i) - mu_c_eff(c) f(k,i)| over random (k, c, i) triples, with
// g evaluated directly from the mode geometry. Full3D only.
double factorization_spot_check(const DiscreteModel& model, const PhysicalSystem& system, std::size_t samples,
                                std::uint64_t seed);

// Mode and channel tables as CSV.
void write_model_csv(const DiscreteModel& model, std::ostream& modes, std::ostream& channels);

}  // namespace watched
