#include "watched/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "watched/errors.hpp"
#include "watched/kernels.hpp"
#include "watched/resolvent.hpp"

namespace watched::dynamics {

namespace {

constexpr cplx kI(0.0, 1.0);

void check_size(std::size_t got, const DiscreteModel& m) {
  if (got != m.state_size()) {
    std::ostringstream os;
    os << "state size " << got << " does not match model size " << m.state_size();
    throw InvalidInput(os.str());
  }
}

}  // namespace

AmplitudeState AmplitudeState::initial(const DiscreteModel& m) {
  AmplitudeState s;
  s.a0 = 1.0;
  s.a_k.assign(m.n_modes(), 0.0);
  s.a_c.assign(m.n_channels() * m.n_atoms(), 0.0);
  return s;
}

ode::State AmplitudeState::to_vector() const {
  ode::State y(1 + a_k.size() + a_c.size());
  y[0] = a0;
  for (std::size_t k = 0; k < a_k.size(); ++k) y[1 + k] = a_k[k];
  for (std::size_t c = 0; c < a_c.size(); ++c) y[1 + a_k.size() + c] = a_c[c];
  return y;
}

AmplitudeState AmplitudeState::from_vector(const ode::State& y, const DiscreteModel& m, double t) {
  check_size(static_cast<std::size_t>(y.size()), m);
  AmplitudeState s;
  s.t = t;
  s.a0 = y[0];
  s.a_k.assign(y.data() + 1, y.data() + 1 + m.n_modes());
  s.a_c.assign(y.data() + 1 + m.n_modes(), y.data() + y.size());
  return s;
}

double AmplitudeState::norm() const {
  double n = std::norm(a0);
  for (const auto& v : a_k) n += std::norm(v);
  for (const auto& v : a_c) n += std::norm(v);
  return n;
}

AmplitudeState derivative(const AmplitudeState& state, const DiscreteModel& m) {
  check_size(1 + state.a_k.size() + state.a_c.size(), m);
  if (state.a_k.size() != m.n_modes()) throw InvalidInput("derivative: mode count mismatch");
  const ode::State y = state.to_vector();
  ode::State dy(y.size());
  kernels::apply_generator_serial(m, 0.0, y.data(), dy.data());
  return AmplitudeState::from_vector(dy, m, state.t);
}

double Trajectory::max_norm_drift() const {
  double worst = 0.0;
  for (double d : norm_drift) worst = std::max(worst, std::abs(d));
  return worst;
}

Trajectory integrate(const DiscreteModel& m, double t_max, const SolverSpec& solver) {
  if (!(t_max > 0.0)) throw InvalidInput("integrate: t_max must be > 0");
  if (t_max >= m.recurrence_time) {
    std::ostringstream os;
    os << "integrate: t_max = " << t_max << " reaches the recurrence time " << m.recurrence_time;
    throw InvalidInput(os.str());
  }

  std::vector<double> times = solver.times;
  if (times.empty()) {
    const std::size_t n = std::max<std::size_t>(solver.n_samples, 2);
    times.resize(n);
    for (std::size_t i = 0; i < n; ++i) times[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
  }

  const double omega_ref = solver.rotating_frame ? m.omega0 : 0.0;
  const bool parallel = solver.parallel;
  ode::Rhs rhs = [&](double, const ode::State& y, ode::State& dy) {
    if (parallel)
      kernels::apply_generator_parallel(m, omega_ref, y.data(), dy.data());
    else
      kernels::apply_generator_serial(m, omega_ref, y.data(), dy.data());
  };

  Trajectory traj;
  traj.times = times;
  traj.a0.resize(times.size());
  traj.survival.resize(times.size());
  traj.norm_drift.resize(times.size());
  traj.model_kind = to_string(m.kind);
  traj.n_modes = m.n_modes();
  traj.n_channels = m.n_channels();
  traj.n_atoms = m.n_atoms();
  traj.recurrence_time = m.recurrence_time;
  traj.rtol = solver.rtol;
  traj.atol = solver.atol;
  traj.rotating_frame = solver.rotating_frame;

  auto observe = [&](std::size_t i, double t, const ode::State& y) {
    // Back to the lab frame: A0 = A0~ exp(-i omega_ref t).
    const cplx a0 = y[0] * std::exp(-kI * omega_ref * t);
    traj.a0[i] = a0;
    traj.survival[i] = std::norm(a0);
    traj.norm_drift[i] = y.squaredNorm() - 1.0;
  };

  ode::Options opt;
  opt.rtol = solver.rtol;
  opt.atol = solver.atol;
  const ode::State y0 = AmplitudeState::initial(m).to_vector();
  traj.stats = ode::dopri5(rhs, y0, 0.0, times, opt, observe);
  return traj;
}

RateFit fit_decay_rate(const Trajectory& traj, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw InvalidInput("fit_decay_rate: need t_lo < t_hi");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_lo || t > t_hi) continue;
    if (!(traj.survival[i] > 0.0)) throw NumericalError("fit_decay_rate: non-positive survival in window");
    x.push_back(t);
    y.push_back(std::log(traj.survival[i]));
  }
  if (x.size() < 10) throw InvalidInput("fit_decay_rate: fewer than 10 samples in window");

  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ssr += r * r;
  }

  RateFit fit;
  fit.rate = -slope;
  fit.intercept = intercept;
  fit.std_error = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  fit.t_lo = x.front();
  fit.t_hi = x.back();
  fit.samples = x.size();
  return fit;
}

std::pair<double, double> default_fit_window(double gamma_expected, double t_max) {
  double lo = 10.0;
  if (gamma_expected > 0.0) lo = std::max(lo, 0.2 / gamma_expected);
  lo = std::min(lo, 0.5 * t_max);
  return {lo, t_max};
}

RouteComparison compare_routes(const DiscreteModel& m, const std::vector<double>& times, const SolverSpec& solver,
                               laplace::ContourSpec contour) {
  if (m.n_modes() + m.n_channels() * m.n_atoms() > 2000)
    throw InvalidInput("compare_routes: model too large for the resolvent route (K + C > 2000)");
  if (times.empty()) throw InvalidInput("compare_routes: empty time grid");

  RouteComparison out;
  out.times = times;
  SolverSpec s = solver;
  s.times = times;
  if (times.front() != 0.0) s.times.insert(s.times.begin(), 0.0);
  const auto traj = integrate(m, s.times.back(), s);
  out.a0_ode.assign(traj.a0.end() - static_cast<std::ptrdiff_t>(times.size()), traj.a0.end());

  // Invert in the rotating frame, where the spectrum sits within the
  // bandwidth of omega0.
  const double omega_ref = m.omega0;
  double band = std::abs(m.omega0 - omega_ref);
  for (double w : m.mode_omega) band = std::max(band, std::abs(w - omega_ref));
  for (double w : m.channel_omega) band = std::max(band, std::abs(w - omega_ref));
  contour.bandwidth = std::max(band, 1e-3);

  laplace::Transform f = [&](cplx z) { return resolvent::resolvent_a0_discrete(z - kI * omega_ref, m, false); };
  const auto inv = laplace::invert_laplace(f, times, contour);
  out.inversion_error = inv.max_error_estimate;
  out.a0_resolvent.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.a0_resolvent[i] = inv.values[i] * std::exp(-kI * omega_ref * times[i]);
    out.max_abs_diff = std::max(out.max_abs_diff, std::abs(out.a0_resolvent[i] - out.a0_ode[i]));
  }
  return out;
}

EarlyTime early_time_slope(const DiscreteModel& m, double t_lo, double t_hi, std::size_t samples) {
  if (!(t_lo > 0.0 && t_lo < t_hi) || samples < 3) throw InvalidInput("early_time_slope: bad window");
  SolverSpec s;
  s.rtol = 1e-13;
  s.atol = 1e-16;
  s.times.push_back(0.0);
  for (std::size_t i = 0; i < samples; ++i)
    s.times.push_back(t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / static_cast<double>(samples - 1)));
  const auto traj = integrate(m, t_hi, s);

  std::vector<double> lx, ly;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double loss = 1.0 - traj.survival[i];
    if (!(loss > 0.0)) throw NumericalError("early_time_slope: no population loss resolved");
    lx.push_back(std::log(traj.times[i]));
    ly.push_back(std::log(loss));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  EarlyTime et;
  et.slope = sxy / sxx;
  et.curvature = (1.0 - traj.survival[1]) / (traj.times[1] * traj.times[1]);
  return et;
}

}  // namespace watched::dynamics
