#pragma once

#include <vector>

#include <Eigen/Core>

#include "watched/discretize.hpp"

// Hot loops in two flavours: an OpenMP version and a plain serial reference.
// Parallel reductions use fixed-size blocks combined in block order, so their
// results do not depend on the thread count.
namespace watched::kernels {

inline constexpr std::size_t kBlock = 512;

// dy = G y for the amplitude equations in a frame rotating at omega_ref.
// Layout of y: a0, modes, then channels atom by atom.
void apply_generator_serial(const DiscreteModel& m, double omega_ref, const cplx* y, cplx* dy);
void apply_generator_parallel(const DiscreteModel& m, double omega_ref, const cplx* y, cplx* dy);

// Finite propagator sums at complex s (lab frame):
//   K      = sum |alpha|^2 / (s + i w)
//   L      = sum mu_c^2 / (s + i w_c)
//   ja[i]  = sum alpha conj(f_i) / (s + i w)
//   jb[i]  = sum f_i conj(alpha) / (s + i w)
//   n[i,j] = sum f_i conj(f_j) / (s + i w)
struct DiscreteSums {
  cplx k = 0.0;
  cplx l = 0.0;
  Eigen::VectorXcd ja;
  Eigen::VectorXcd jb;
  Eigen::MatrixXcd n;
};

DiscreteSums discrete_sums_serial(const DiscreteModel& m, cplx s);
DiscreteSums discrete_sums_parallel(const DiscreteModel& m, cplx s);

// <l^2> over three independent spheres, product rule with `order`
// Gauss-Legendre nodes in cos(theta) and 2*order uniform phi nodes.
double l2_average_serial(int order);
double l2_average_parallel(int order);

}  // namespace watched::kernels
