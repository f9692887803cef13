#include "watched/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "watched/errors.hpp"
#include "watched/rng.hpp"

namespace watched::analytic {

using std::numbers::pi;

double einstein_a(double omega0, double mu_a) { return 4.0 * omega0 * omega0 * omega0 * mu_a * mu_a / 3.0; }

double mu_a_from_gamma(double omega0, double gamma) {
  return std::sqrt(3.0 * gamma / (4.0 * omega0 * omega0 * omega0));
}

double beta_param(double omega0, double mu_c, double rho0) {
  return 2.0 * pi * omega0 * omega0 * omega0 * mu_c * mu_c * rho0 / 3.0;
}

double mu_c_from_beta(double omega0, double beta, double rho0) {
  if (rho0 <= 0.0) return 0.0;
  return std::sqrt(3.0 * beta / (2.0 * pi * omega0 * omega0 * omega0 * rho0));
}

namespace {

double far_field_deficit(double beta, double l, double z) {
  const double s = geometry::s_func(z);
  return 2.25 * beta * l * l * s * s;
}

double general_deficit(double beta, double d) { return 9.0 * beta * d * d / (64.0 * pi * pi); }

}  // namespace

ReductionReport reduction_single(const geometry::DipoleGeometry& g, double beta, const Thresholds& th) {
  ReductionReport r;
  r.d_printed = geometry::d_func(g);
  r.d_oracle = geometry::d_oracle(g);
  r.l = geometry::dipole_factor_l(g.p_a, g.p_d, g.r_hat);
  const double pp = g.p_d.dot(g.p_a);

  r.u_general = 1.0 - general_deficit(beta, r.d_printed);
  r.u_oracle = 1.0 - general_deficit(beta, r.d_oracle);
  r.u_far_field = 1.0 - far_field_deficit(beta, r.l, g.z);
  r.u_near_field = 1.0 - beta * pp * pp;
  r.far_field_applicable = g.z > th.far_field_z;
  r.near_field_applicable = g.z < th.near_field_z;

  std::vector<double> pool = {r.u_general, r.u_oracle};
  if (r.far_field_applicable) pool.push_back(r.u_far_field);
  if (r.near_field_applicable) pool.push_back(r.u_near_field);
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      r.discrepancy = std::max(r.discrepancy, std::abs(pool[i] - pool[j]));
  return r;
}

MultiResult reduction_multi(const std::vector<DetectorAtom>& atoms, const Vec3& p_a, double beta, double omega0) {
  MultiResult out;
  double deficit = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double r = atoms[i].position.norm();
    if (!(r > 0.0)) throw InvalidInput("reduction_multi: detector atom " + std::to_string(i) + " at r = 0");
    const Vec3 r_hat = atoms[i].position / r;
    const double l = geometry::dipole_factor_l(p_a, atoms[i].dipole_dir, r_hat);
    deficit += far_field_deficit(beta, l, omega0 * r);
  }
  out.u = 1.0 - deficit;
  if (out.u < 0.0) {
    std::ostringstream os;
    os << "U = " << out.u << " < 0: inter-atom coupling cannot be neglected";
    out.warnings.push_back(os.str());
  }
  return out;
}

double reduction_shell(std::size_t n_atoms, double radius_z, double beta) {
  const double s = geometry::s_func(radius_z);
  return 1.0 - (9.0 / 14.0) * beta * static_cast<double>(n_atoms) * s * s;
}

ShellEstimate reduction_shell_mc(std::size_t n_atoms, double radius_z, double beta, std::size_t samples,
                                 std::uint64_t seed) {
  auto gen = substream(seed, "shell_placement");
  std::vector<DetectorAtom> atoms(n_atoms);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t n = 1; n <= samples; ++n) {
    const Vec3 p_a = random_unit(gen);
    for (auto& a : atoms) {
      a.position = radius_z * random_unit(gen);
      a.dipole_dir = random_unit(gen);
    }
    const double u = reduction_multi(atoms, p_a, beta).u;
    const double delta = u - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (u - mean);
  }
  ShellEstimate est;
  est.samples = samples;
  est.mean = mean;
  if (samples > 1) est.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return est;
}

double survival_ww(double t, double gamma, double u) { return std::exp(-gamma * u * t); }

RegimeReport magnitude_checks(const PhysicalSystem& s, double threshold) {
  const double w3 = s.omega0 * s.omega0 * s.omega0;
  const double mu_a = mu_a_from_gamma(s.omega0, s.gamma);
  const double mu_c = mu_c_from_beta(s.omega0, s.beta, s.dos.normalization);
  const double i_ww = 2.0 * w3 / 3.0;
  const double l_ww = pi * mu_c * mu_c * s.dos.normalization;
  RegimeReport r;
  r.li = l_ww * i_ww;
  r.self_energy = mu_a * mu_a * i_ww / s.omega0;
  r.li_small = r.li < threshold;
  r.self_energy_small = r.self_energy < threshold;
  return r;
}

}  // namespace watched::analytic
