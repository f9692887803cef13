#include "watched/kernels.hpp"

#include <cmath>
#include <numbers>

#include "watched/errors.hpp"
#include "watched/quadrature.hpp"

namespace watched::kernels {

namespace {

constexpr cplx kI(0.0, 1.0);

std::size_t n_blocks(std::size_t n) { return (n + kBlock - 1) / kBlock; }

cplx pole_factor(cplx s, double omega) {
  const cplx d = s + kI * omega;
  if (std::abs(d) < 1e-12) throw NumericalError("propagator pole hit at omega = " + std::to_string(omega));
  return 1.0 / d;
}

// X_i = sum_c mu_c a_{c,i}
void channel_projections(const DiscreteModel& m, const cplx* y, std::vector<cplx>& x) {
  const std::size_t nk = m.n_modes(), nc = m.n_channels();
  x.assign(m.n_atoms(), 0.0);
  for (std::size_t i = 0; i < m.n_atoms(); ++i) {
    const cplx* ac = y + 1 + nk + i * nc;
    cplx acc = 0.0;
    for (std::size_t c = 0; c < nc; ++c) acc += m.channel_mu[c] * ac[c];
    x[i] = acc;
  }
}

void channel_update(const DiscreteModel& m, double omega_ref, const cplx* y, const std::vector<cplx>& yi,
                    cplx* dy) {
  const std::size_t nk = m.n_modes(), nc = m.n_channels();
  for (std::size_t i = 0; i < m.n_atoms(); ++i) {
    const std::size_t off = 1 + nk + i * nc;
    for (std::size_t c = 0; c < nc; ++c)
      dy[off + c] = -kI * ((m.channel_omega[c] - omega_ref) * y[off + c] + m.channel_mu[c] * yi[i]);
  }
}

}  // namespace

void apply_generator_serial(const DiscreteModel& m, double omega_ref, const cplx* y, cplx* dy) {
  const std::size_t nk = m.n_modes(), na = m.n_atoms();
  const cplx* ak = y + 1;

  cplx s_alpha = 0.0;
  std::vector<cplx> yi(na, 0.0);
  for (std::size_t k = 0; k < nk; ++k) {
    s_alpha += m.mode_alpha[k] * ak[k];
    for (std::size_t i = 0; i < na; ++i) yi[i] += m.detector_factor[i][k] * ak[k];
  }
  std::vector<cplx> x;
  channel_projections(m, y, x);

  dy[0] = -kI * ((m.omega0 - omega_ref) * y[0] + s_alpha);
  for (std::size_t k = 0; k < nk; ++k) {
    cplx back = std::conj(m.mode_alpha[k]) * y[0];
    for (std::size_t i = 0; i < na; ++i) back += std::conj(m.detector_factor[i][k]) * x[i];
    dy[1 + k] = -kI * ((m.mode_omega[k] - omega_ref) * ak[k] + back);
  }
  channel_update(m, omega_ref, y, yi, dy);
}

void apply_generator_parallel(const DiscreteModel& m, double omega_ref, const cplx* y, cplx* dy) {
  const std::size_t nk = m.n_modes(), na = m.n_atoms();
  const cplx* ak = y + 1;
  const std::size_t nb = n_blocks(nk);
  const std::size_t stride = na + 1;

  // Per block: [sum alpha a_k, Y_0, ..., Y_{na-1}]
  std::vector<cplx> partial(nb * stride, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * kBlock, hi = std::min(nk, lo + kBlock);
    cplx* p = partial.data() + b * stride;
    for (std::size_t k = lo; k < hi; ++k) {
      p[0] += m.mode_alpha[k] * ak[k];
      for (std::size_t i = 0; i < na; ++i) p[1 + i] += m.detector_factor[i][k] * ak[k];
    }
  }
  cplx s_alpha = 0.0;
  std::vector<cplx> yi(na, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    s_alpha += partial[b * stride];
    for (std::size_t i = 0; i < na; ++i) yi[i] += partial[b * stride + 1 + i];
  }
  std::vector<cplx> x;
  channel_projections(m, y, x);

  dy[0] = -kI * ((m.omega0 - omega_ref) * y[0] + s_alpha);
  const cplx a0 = y[0];
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < nk; ++k) {
    cplx back = std::conj(m.mode_alpha[k]) * a0;
    for (std::size_t i = 0; i < na; ++i) back += std::conj(m.detector_factor[i][k]) * x[i];
    dy[1 + k] = -kI * ((m.mode_omega[k] - omega_ref) * ak[k] + back);
  }
  channel_update(m, omega_ref, y, yi, dy);
}

namespace {

DiscreteSums empty_sums(std::size_t na) {
  DiscreteSums out;
  out.ja = Eigen::VectorXcd::Zero(na);
  out.jb = Eigen::VectorXcd::Zero(na);
  out.n = Eigen::MatrixXcd::Zero(na, na);
  return out;
}

void accumulate_modes(const DiscreteModel& m, cplx s, std::size_t lo, std::size_t hi, DiscreteSums& acc) {
  const std::size_t na = m.n_atoms();
  std::vector<cplx> f(na);
  for (std::size_t k = lo; k < hi; ++k) {
    const cplx d = pole_factor(s, m.mode_omega[k]);
    const cplx alpha = m.mode_alpha[k];
    acc.k += std::norm(alpha) * d;
    for (std::size_t i = 0; i < na; ++i) f[i] = m.detector_factor[i][k];
    for (std::size_t i = 0; i < na; ++i) {
      acc.ja[i] += alpha * std::conj(f[i]) * d;
      acc.jb[i] += f[i] * std::conj(alpha) * d;
      for (std::size_t j = 0; j < na; ++j) acc.n(i, j) += f[i] * std::conj(f[j]) * d;
    }
  }
}

cplx channel_sum(const DiscreteModel& m, cplx s) {
  cplx l = 0.0;
  for (std::size_t c = 0; c < m.n_channels(); ++c) l += m.channel_mu[c] * m.channel_mu[c] * pole_factor(s, m.channel_omega[c]);
  return l;
}

}  // namespace

DiscreteSums discrete_sums_serial(const DiscreteModel& m, cplx s) {
  DiscreteSums out = empty_sums(m.n_atoms());
  accumulate_modes(m, s, 0, m.n_modes(), out);
  out.l = channel_sum(m, s);
  return out;
}

DiscreteSums discrete_sums_parallel(const DiscreteModel& m, cplx s) {
  const std::size_t nk = m.n_modes(), na = m.n_atoms();
  const std::size_t nb = n_blocks(nk);
  std::vector<DiscreteSums> partial(nb, empty_sums(na));
  bool pole_hit = false;
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nb; ++b) {
    try {
      accumulate_modes(m, s, b * kBlock, std::min(nk, (b + 1) * kBlock), partial[b]);
    } catch (const NumericalError&) {
#pragma omp atomic write
      pole_hit = true;
    }
  }
  if (pole_hit) throw NumericalError("propagator pole hit");
  DiscreteSums out = empty_sums(na);
  for (const auto& p : partial) {
    out.k += p.k;
    out.ja += p.ja;
    out.jb += p.jb;
    out.n += p.n;
  }
  out.l = channel_sum(m, s);
  return out;
}

namespace {

struct SpherePoints {
  std::vector<Vec3> dirs;
  std::vector<double> weights;  // sum to 1
};

SpherePoints sphere_rule(int order) {
  if (order < 1) throw InvalidInput("sphere rule order must be >= 1");
  const auto gl = quad::gauss_legendre(order);
  const int n_phi = 2 * order;
  SpherePoints sp;
  for (std::size_t t = 0; t < gl.size(); ++t) {
    const double ct = gl.nodes[t], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int p = 0; p < n_phi; ++p) {
      const double phi = 2.0 * std::numbers::pi * p / n_phi;
      sp.dirs.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      sp.weights.push_back(gl.weights[t] / (2.0 * n_phi));
    }
  }
  return sp;
}

// Contribution of one r_hat node, summed over all (p_a, p_d) pairs.
double l2_slice(const SpherePoints& sp, std::size_t ir) {
  const Vec3& r = sp.dirs[ir];
  const std::size_t n = sp.dirs.size();
  double acc = 0.0;
  for (std::size_t ia = 0; ia < n; ++ia) {
    const Vec3& pa = sp.dirs[ia];
    const double rpa = r.dot(pa);
    double inner = 0.0;
    for (std::size_t id = 0; id < n; ++id) {
      const Vec3& pd = sp.dirs[id];
      const double l = pd.dot(pa) - r.dot(pd) * rpa;
      inner += sp.weights[id] * l * l;
    }
    acc += sp.weights[ia] * inner;
  }
  return sp.weights[ir] * acc;
}

}  // namespace

double l2_average_serial(int order) {
  const auto sp = sphere_rule(order);
  double total = 0.0;
  for (std::size_t ir = 0; ir < sp.dirs.size(); ++ir) total += l2_slice(sp, ir);
  return total;
}

double l2_average_parallel(int order) {
  const auto sp = sphere_rule(order);
  std::vector<double> slice(sp.dirs.size());
#pragma omp parallel for schedule(static)
  for (std::size_t ir = 0; ir < sp.dirs.size(); ++ir) slice[ir] = l2_slice(sp, ir);
  double total = 0.0;
  for (double v : slice) total += v;
  return total;
}

}  // namespace watched::kernels
