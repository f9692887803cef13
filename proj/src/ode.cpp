#include "watched/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "watched/errors.hpp"

namespace watched::ode {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double error_norm(const State& err, const State& y0, const State& y1, const Options& opt) {
  double acc = 0.0;
  const auto n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(n, 1)));
}

double initial_step(const Rhs& f, const State& y, const State& k1, double t0, const Options& opt,
                    Stats& stats) {
  const Eigen::ArrayXd sc = opt.atol + opt.rtol * y.cwiseAbs().array();
  auto rms = [&](const State& v) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::norm(v[i]) / (sc[i] * sc[i]);
    return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
  };
  const double d0 = rms(y), d1n = rms(k1);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  State y1 = y + h0 * k1;
  State k2(y.size());
  f(t0 + h0, y1, k2);
  ++stats.rhs_evals;
  const double d2 = rms(k2 - k1) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, opt.h_max});
}

}  // namespace

Stats dopri5(const Rhs& f, State y, double t0, const std::vector<double>& t_out, const Options& opt,
             const Observer& observe) {
  Stats stats;
  if (t_out.empty()) return stats;
  if (t_out.front() < t0) throw InvalidInput("dopri5: output times precede t0");
  for (std::size_t i = 1; i < t_out.size(); ++i)
    if (t_out[i] < t_out[i - 1]) throw InvalidInput("dopri5: output times must be non-decreasing");

  const auto n = y.size();
  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  f(t0, y, k1);
  ++stats.rhs_evals;

  std::size_t next = 0;
  double t = t0;
  while (next < t_out.size() && t_out[next] <= t) observe(next, t_out[next], y), ++next;
  if (next == t_out.size()) return stats;

  const double t_end = t_out.back();
  double h = opt.h_init > 0.0 ? opt.h_init : initial_step(f, y, k1, t0, opt, stats);
  bool last_rejected = false;

  while (next < t_out.size()) {
    if (stats.accepted + stats.rejected >= opt.max_steps) throw NumericalError("dopri5: max_steps exhausted");
    h = std::min(h, opt.h_max);
    if (t + h > t_end) h = t_end - t;
    if (h < opt.h_min && t + h < t_end) {
      std::ostringstream os;
      os << "dopri5: step size underflow at t = " << t << " (h = " << h << ")";
      throw NumericalError(os.str());
    }

    ytmp = y + h * (a21 * k1);
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, ynew, k7);
    stats.rhs_evals += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double e = error_norm(err, y, ynew, opt);

    if (e <= 1.0) {
      const double t_new = t + h;
      if (next < t_out.size() && t_out[next] <= t_new) {
        const State ydiff = ynew - y;
        const State bspl = h * k1 - ydiff;
        const State r4 = ydiff - h * k7 - bspl;
        const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next < t_out.size() && t_out[next] <= t_new) {
          if (t_out[next] == t_new) {
            observe(next, t_out[next], ynew);
          } else {
            const double th = (t_out[next] - t) / h, th1 = 1.0 - th;
            const State yi = y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)));
            observe(next, t_out[next], yi);
          }
          ++next;
        }
      }
      y.swap(ynew);
      k1.swap(k7);
      t = t_new;
      ++stats.accepted;
      double fac = e > 0.0 ? 0.9 * std::pow(e, -0.2) : 10.0;
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      last_rejected = false;
    } else {
      ++stats.rejected;
      const double fac = std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.1;
      h *= fac;
      last_rejected = true;
    }
  }
  return stats;
}

}  // namespace watched::ode
