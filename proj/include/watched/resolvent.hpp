#pragma once

#include <Eigen/Core>

#include "watched/discretize.hpp"
#include "watched/geometry.hpp"
#include "watched/model.hpp"

namespace watched::resolvent {

// sum_k |alpha_k|^2 / (s + i omega_k)
cplx k_discrete(cplx s, const DiscreteModel& model);

// Channel-space propagators with channels indexed c + i * n_channels:
//   m_ac(c,i) = mu_c * ja_i, m_ca(c,i) = mu_c * jb_i,
//   n((c,i),(c',j)) = mu_c mu_c' * ntilde_ij.
struct Propagators {
  cplx k = 0.0;
  Eigen::VectorXcd m_ac;
  Eigen::VectorXcd m_ca;
  Eigen::MatrixXcd n;
};

Propagators propagators(cplx s, const DiscreteModel& model);

// Effective self-energy of the excited state after eliminating modes and
// channels: A0(s) = 1 / (s + i omega0 + sigma(s)).
cplx self_energy(cplx s, const DiscreteModel& model, bool parallel = true);

// A0(s) through the rank-per-atom reduction of the channel block.
cplx resolvent_a0_discrete(cplx s, const DiscreteModel& model, bool parallel = true);

// A0(s) through a dense LU solve of the full channel system.
cplx resolvent_a0_dense(cplx s, const DiscreteModel& model);

enum class KernelMode { WW, Numerical };
enum class DConvention { Printed, Oracle };

struct KernelOptions {
  KernelMode mode = KernelMode::WW;
  DConvention convention = DConvention::Printed;
  double omega_cut = 4.0;
  // Drop the principal-value (level shift) parts before forming U.
  bool discard_shift = true;
  double tolerance = 1e-10;
};

struct ContinuumKernels {
  cplx i = 0.0;
  cplx j = 0.0;
  cplx l = 0.0;
  cplx u = 1.0;          // 1 - L J^2 / I, with L I neglected against 1
  cplx u_with_li = 1.0;  // 1 - L J^2 / (I (1 + L I))
  // Imaginary parts removed when discard_shift is set.
  double i_shift = 0.0;
  double j_shift = 0.0;
  double l_shift = 0.0;
  double mu_a = 0.0;
};

ContinuumKernels kernels_continuum(cplx s, const geometry::DipoleGeometry& geom, const PhysicalSystem& system,
                                   const KernelOptions& opt = {});

struct Pole {
  double rate = 0.0;   // P(t) ~ exp(-rate t)
  double shift = 0.0;  // frequency shift, reported only
};

// rate = 2 Re[mu_a^2 I U], shift = -Im[mu_a^2 I U]. Throws InvalidInput if
// the system is outside the regime where LI and mu_a^2 I are small.
Pole ww_pole(const ContinuumKernels& kernels, const PhysicalSystem& system);

struct PoleOptions {
  double gamma_probe = 0.01;  // distance of the probe point from the real axis
  bool richardson = true;     // 2 R(g) - R(2g)
  bool dressed = false;       // probe at the shifted frequency omega0 + Im sigma
};

// Weisskopf-Wigner pole of a finite model: rate = 2 Re sigma(-i omega + g).
Pole ww_pole(const DiscreteModel& model, const PoleOptions& opt = {});

struct DiscreteReduction {
  double u = 1.0;          // Re sigma / Re K at the probe point
  double rate_vacuum = 0.0;
  double rate = 0.0;
  // max_i |ja_i - jb_i| / max(|ja_i|, |jb_i|) at the probe point
  double directed_asymmetry = 0.0;
};

// Reduction factor of a finite model from its own discrete kernels.
DiscreteReduction u_discrete(const DiscreteModel& model, const PoleOptions& opt = {});

}  // namespace watched::resolvent
