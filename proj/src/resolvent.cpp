#include "watched/resolvent.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "watched/analytic.hpp"
#include "watched/errors.hpp"
#include "watched/kernels.hpp"

namespace watched::resolvent {

using std::numbers::pi;
constexpr cplx kI(0.0, 1.0);

namespace {

kernels::DiscreteSums sums(cplx s, const DiscreteModel& m, bool parallel) {
  return parallel ? kernels::discrete_sums_parallel(m, s) : kernels::discrete_sums_serial(m, s);
}

cplx invert_denominator(cplx d) {
  if (!(std::abs(d) > 1e-300) || !std::isfinite(std::abs(d))) throw NumericalError("resolvent: singular system");
  return 1.0 / d;
}

}  // namespace

cplx k_discrete(cplx s, const DiscreteModel& m) {
  cplx k = 0.0;
  for (std::size_t i = 0; i < m.n_modes(); ++i) {
    const cplx d = s + kI * m.mode_omega[i];
    if (std::abs(d) < 1e-12) throw NumericalError("k_discrete: pole hit");
    k += std::norm(m.mode_alpha[i]) / d;
  }
  return k;
}

Propagators propagators(cplx s, const DiscreteModel& m) {
  const auto sm = kernels::discrete_sums_serial(m, s);
  const std::size_t nc = m.n_channels(), na = m.n_atoms(), dim = nc * na;
  Propagators p;
  p.k = sm.k;
  p.m_ac.resize(dim);
  p.m_ca.resize(dim);
  p.n.resize(dim, dim);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t c = 0; c < nc; ++c) {
      const std::size_t row = c + i * nc;
      p.m_ac[row] = m.channel_mu[c] * sm.ja[i];
      p.m_ca[row] = m.channel_mu[c] * sm.jb[i];
      for (std::size_t j = 0; j < na; ++j)
        for (std::size_t c2 = 0; c2 < nc; ++c2)
          p.n(row, c2 + j * nc) = m.channel_mu[c] * m.channel_mu[c2] * sm.n(i, j);
    }
  return p;
}

cplx self_energy(cplx s, const DiscreteModel& m, bool parallel) {
  const auto sm = sums(s, m, parallel);
  const std::size_t na = m.n_atoms();
  if (na == 0 || m.n_channels() == 0) return sm.k;
  const Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(na, na) + sm.l * sm.n;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
  const Eigen::VectorXcd x = lu.solve(sm.jb);
  return sm.k - sm.l * (sm.ja.transpose() * x).value();
}

cplx resolvent_a0_discrete(cplx s, const DiscreteModel& m, bool parallel) {
  return invert_denominator(s + kI * m.omega0 + self_energy(s, m, parallel));
}

cplx resolvent_a0_dense(cplx s, const DiscreteModel& m) {
  const auto p = propagators(s, m);
  cplx denom = s + kI * m.omega0 + p.k;
  const std::size_t nc = m.n_channels(), dim = p.m_ca.size();
  if (dim > 0) {
    Eigen::MatrixXcd sys = p.n;
    for (std::size_t r = 0; r < dim; ++r) {
      const cplx d = s + kI * m.channel_omega[r % nc];
      if (std::abs(d) < 1e-12) throw NumericalError("resolvent_a0_dense: pole hit");
      sys(r, r) += d;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys);
    const Eigen::VectorXcd x = lu.solve(p.m_ca);
    denom -= (p.m_ac.transpose() * x).value();
  }
  return invert_denominator(denom);
}

namespace {

// Adaptive Gauss-Kronrod over [a, b] with breakpoints around the point where
// s + i omega is smallest.
template <class F>
cplx integrate_near_pole(F f, double a, double b, cplx s, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  const double center = -s.imag();
  const double width = std::max(std::abs(s.real()), 1e-6);
  std::vector<double> cuts = {a};
  for (double c : {center - 20.0 * width, center - width, center, center + width, center + 20.0 * width})
    if (c > cuts.back() && c < b) cuts.push_back(c);
  cuts.push_back(b);
  cplx total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, tol, &err);
    if (!(err <= 1e3 * tol * std::max(1.0, std::abs(total))))
      throw NumericalError("kernels_continuum: quadrature did not converge");
  }
  return total;
}

double angular_kernel(const geometry::DipoleGeometry& g, DConvention conv) {
  return conv == DConvention::Printed ? geometry::d_func(g) : geometry::d_oracle(g);
}

}  // namespace

ContinuumKernels kernels_continuum(cplx s, const geometry::DipoleGeometry& geom, const PhysicalSystem& system,
                                   const KernelOptions& opt) {
  const double w0 = system.omega0, w03 = w0 * w0 * w0;
  const double mu_c = analytic::mu_c_from_beta(w0, system.beta, system.dos.normalization);
  ContinuumKernels k;
  k.mu_a = system.mu_a();

  if (opt.mode == KernelMode::WW) {
    geometry::DipoleGeometry g = geom;
    k.i = 2.0 * w03 / 3.0;
    k.j = w03 / (4.0 * pi) * angular_kernel(g, opt.convention);
    k.l = pi * mu_c * mu_c * system.dos.normalization;
  } else {
    if (!(s.real() > 0.0)) throw InvalidInput("kernels_continuum: Re s must be > 0");
    const double r = w0 > 0.0 ? geom.z / w0 : 0.0;
    const auto i_int = [&](double w) { return cplx(w * w * w) / (s + kI * w); };
    const auto j_int = [&](double w) {
      geometry::DipoleGeometry g = geom;
      g.z = w * r;
      return cplx(w * w * w * angular_kernel(g, opt.convention)) / (s + kI * w);
    };
    const auto l_int = [&](double w) { return cplx(system.dos.density(w, w0) * mu_c * mu_c) / (s + kI * w); };
    k.i = 2.0 / (3.0 * pi) * integrate_near_pole(i_int, 0.0, opt.omega_cut, s, opt.tolerance);
    // Prefactor chosen so that the pole value is omega0^3 D / (4 pi).
    k.j = 1.0 / (4.0 * pi * pi) * integrate_near_pole(j_int, 0.0, opt.omega_cut, s, opt.tolerance);
    k.l = integrate_near_pole(l_int, system.omega_i, system.dos.omega_cut_c, s, opt.tolerance);
  }

  if (opt.discard_shift) {
    k.i_shift = k.i.imag();
    k.j_shift = k.j.imag();
    k.l_shift = k.l.imag();
    k.i = k.i.real();
    k.j = k.j.real();
    k.l = k.l.real();
  }
  k.u = 1.0 - k.l * k.j * k.j / k.i;
  k.u_with_li = 1.0 - k.l * k.j * k.j / (k.i * (1.0 + k.l * k.i));
  return k;
}

Pole ww_pole(const ContinuumKernels& k, const PhysicalSystem& system) {
  const auto regime = analytic::magnitude_checks(system);
  if (!regime.li_small || !regime.self_energy_small)
    throw InvalidInput("ww_pole: outside the regime where LI and mu_a^2 I are small");
  const cplx x = k.mu_a * k.mu_a * k.i * k.u;
  return {2.0 * x.real(), -x.imag()};
}

namespace {

double probe_rate(const DiscreteModel& m, double omega, double gamma, bool detector) {
  const cplx s(gamma, -omega);
  const cplx sigma = detector ? self_energy(s, m) : k_discrete(s, m);
  return 2.0 * sigma.real();
}

double pole_rate(const DiscreteModel& m, double omega, const PoleOptions& opt, bool detector) {
  const double r1 = probe_rate(m, omega, opt.gamma_probe, detector);
  if (!opt.richardson) return r1;
  return 2.0 * r1 - probe_rate(m, omega, 2.0 * opt.gamma_probe, detector);
}

double probe_frequency(const DiscreteModel& m, const PoleOptions& opt) {
  if (!opt.dressed) return m.omega0;
  return m.omega0 + self_energy(cplx(opt.gamma_probe, -m.omega0), m).imag();
}

}  // namespace

Pole ww_pole(const DiscreteModel& m, const PoleOptions& opt) {
  const double omega = probe_frequency(m, opt);
  Pole p;
  p.rate = pole_rate(m, omega, opt, true);
  p.shift = -self_energy(cplx(opt.gamma_probe, -omega), m).imag();
  return p;
}

DiscreteReduction u_discrete(const DiscreteModel& m, const PoleOptions& opt) {
  const double omega = probe_frequency(m, opt);
  DiscreteReduction r;
  r.rate_vacuum = pole_rate(m, omega, opt, false);
  r.rate = pole_rate(m, omega, opt, true);
  r.u = r.rate / r.rate_vacuum;
  const auto sm = kernels::discrete_sums_parallel(m, cplx(opt.gamma_probe, -omega));
  for (Eigen::Index i = 0; i < sm.ja.size(); ++i) {
    const double scale = std::max(std::abs(sm.ja[i]), std::abs(sm.jb[i]));
    if (scale > 0.0) r.directed_asymmetry = std::max(r.directed_asymmetry, std::abs(sm.ja[i] - sm.jb[i]) / scale);
  }
  return r;
}

}  // namespace watched::resolvent
