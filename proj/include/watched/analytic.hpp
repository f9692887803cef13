#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "watched/geometry.hpp"
#include "watched/model.hpp"

namespace watched::analytic {

// Gamma = 4 omega0^3 mu_a^2 / 3
double einstein_a(double omega0, double mu_a);
double mu_a_from_gamma(double omega0, double gamma);

// beta = 2 pi omega0^3 mu_c^2 rho0 / 3
double beta_param(double omega0, double mu_c, double rho0);
double mu_c_from_beta(double omega0, double beta, double rho0);

struct Thresholds {
  double far_field_z = 2.0 * 3.14159265358979323846;  // far field applies for z above this
  double near_field_z = 0.1;                          // near field applies for z below this

  bool operator==(const Thresholds&) const = default;
};

struct ReductionReport {
  double u_general = 1.0;     // 1 - 9 beta D^2 / 64 pi^2 with the printed D
  double u_far_field = 1.0;   // 1 - (9/4) beta l^2 sin^2(z) / z^2
  double u_near_field = 1.0;  // 1 - beta (p_d.p_a)^2
  double u_oracle = 1.0;      // same as u_general with the quadrature kernel
  double d_printed = 0.0;
  double d_oracle = 0.0;
  double l = 0.0;
  bool far_field_applicable = false;
  bool near_field_applicable = false;
  // max pairwise |dU| among u_general, u_oracle and whichever limits apply
  double discrepancy = 0.0;
};

ReductionReport reduction_single(const geometry::DipoleGeometry& geom, double beta,
                                 const Thresholds& thresholds = {});

struct MultiResult {
  double u = 1.0;
  std::vector<std::string> warnings;
};

// Additive far-field deficits over detector atoms. Throws InvalidInput for an
// atom at the origin.
MultiResult reduction_multi(const std::vector<DetectorAtom>& atoms, const Vec3& p_a, double beta,
                            double omega0 = 1.0);

// Thin shell: 1 - (9/14) beta N (sin^2 z) / z^2
double reduction_shell(std::size_t n_atoms, double radius_z, double beta);

struct ShellEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Average of reduction_multi over uniform placements on the shell with random
// atom and detector dipoles.
ShellEstimate reduction_shell_mc(std::size_t n_atoms, double radius_z, double beta, std::size_t samples,
                                 std::uint64_t seed);

double survival_ww(double t, double gamma, double u);

struct RegimeReport {
  double li = 0.0;           // L * I at the pole
  double self_energy = 0.0;  // mu_a^2 I / omega0
  bool li_small = true;
  bool self_energy_small = true;
};

inline constexpr double kRegimeThreshold = 0.1;

RegimeReport magnitude_checks(const PhysicalSystem& system, double threshold = kRegimeThreshold);

}  // namespace watched::analytic
