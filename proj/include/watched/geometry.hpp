#pragma once

#include <cstdint>
#include <vector>

#include "watched/model.hpp"

namespace watched::geometry {

struct DipoleGeometry {
  Vec3 p_a = Vec3::UnitZ();
  Vec3 p_d = Vec3::UnitZ();
  Vec3 r_hat = Vec3::UnitX();
  double z = 0.0;  // omega0 * r / c

  // Geometry of a detector atom seen from the atom at the origin. A detector
  // at the origin gets r_hat = x-hat and z = 0.
  static DipoleGeometry from_detector(const Vec3& p_a, const DetectorAtom& atom, double omega0 = 1.0);
  bool valid() const;
};

// sin(z)/z, with the series branch below 1e-4.
double s_func(double z);

// Integral of xi^2 exp(-i z xi) over [-1, 1], real by parity.
double t_func(double z);

// Series branch thresholds; both branches agree to 1e-12 at the switch.
inline constexpr double kSSeriesBelow = 1e-4;
inline constexpr double kTSeriesBelow = 0.5;

// Angular kernel as printed: p_d.p_a (S + T) + (r.p_d)(r.p_a)(S - 3T).
double d_func(const DipoleGeometry& geom);

// Angular kernel reconstructed by direct quadrature over k-hat of
// sum_lambda (p_d.eps)(p_a.eps) exp(-i k.r), with k = omega0 and |r| = z.
// This is the full solid-angle integral, without any normalization.
cplx d_oracle_complex(const DipoleGeometry& geom, int n_theta = 0, int n_phi = 8);
double d_oracle(const DipoleGeometry& geom, int n_theta = 0, int n_phi = 8);

// l = p_d.p_a - (r.p_d)(r.p_a)
double dipole_factor_l(const Vec3& p_a, const Vec3& p_d, const Vec3& r_hat);

struct PolarizationBasis {
  Vec3 e1;
  Vec3 e2;
};

// Two orthonormal polarization vectors transverse to k_hat.
PolarizationBasis polarization_basis(const Vec3& k_hat);

// sum_lambda (a.eps_lambda)(b.eps_lambda) from an explicit basis.
double polarization_sum(const Vec3& a, const Vec3& b, const Vec3& k_hat);

// <l^2> over independent uniform orientations of p_a, p_d and r_hat by a
// product rule (Gauss-Legendre in cos(theta) x uniform phi) on each sphere.
double angular_average_l2(int order);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

McEstimate angular_average_l2_mc(std::size_t samples, std::uint64_t seed);

// Relation between the printed kernel and the quadrature kernel.
struct NormalizationSample {
  double z = 0.0;
  double pd_dot_pa = 0.0;
  double rpd_rpa = 0.0;
  double printed = 0.0;
  double oracle = 0.0;
};

struct NormalizationReport {
  // printed / oracle in the S+T channel at z = 0 (parallel dipoles normal to r)
  double match_constant = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  // max |ratio / match_constant - 1| over samples with a non-negligible oracle
  double max_rel_spread = 0.0;
  bool single_constant = false;
  std::vector<NormalizationSample> samples;
};

NormalizationReport d_normalization_report(const std::vector<double>& z_values);

}  // namespace watched::geometry
