#include "watched/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "watched/kernels.hpp"
#include "watched/quadrature.hpp"
#include "watched/rng.hpp"

namespace watched::geometry {

using std::numbers::pi;

DipoleGeometry DipoleGeometry::from_detector(const Vec3& p_a, const DetectorAtom& atom, double omega0) {
  DipoleGeometry g;
  g.p_a = p_a;
  g.p_d = atom.dipole_dir;
  const double r = atom.position.norm();
  if (r > 0.0) {
    g.r_hat = atom.position / r;
    g.z = omega0 * r;
  } else {
    g.r_hat = Vec3::UnitX();
    g.z = 0.0;
  }
  return g;
}

bool DipoleGeometry::valid() const { return is_unit(p_a) && is_unit(p_d) && is_unit(r_hat) && z >= 0.0; }

double s_func(double z) {
  if (z < kSSeriesBelow) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

double t_func(double z) {
  if (z < kTSeriesBelow) {
    // sum_n (-1)^n z^(2n) / (2n)! * 2 / (2n + 3)
    const double z2 = z * z;
    double term = 1.0;  // (-1)^n z^(2n) / (2n)!
    double sum = 0.0;
    for (int n = 0; n < 30; ++n) {
      const double add = term * 2.0 / (2.0 * n + 3.0);
      sum += add;
      if (std::abs(add) < 1e-18) break;
      term *= -z2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    }
    return sum;
  }
  const double s = std::sin(z), c = std::cos(z);
  return 2.0 * s / z + 4.0 * c / (z * z) - 4.0 * s / (z * z * z);
}

double d_func(const DipoleGeometry& g) {
  const double s = s_func(g.z), t = t_func(g.z);
  const double pp = g.p_d.dot(g.p_a);
  const double rr = g.r_hat.dot(g.p_d) * g.r_hat.dot(g.p_a);
  return pp * (s + t) + rr * (s - 3.0 * t);
}

namespace {

// Orthonormal pair spanning the plane normal to n.
std::pair<Vec3, Vec3> transverse_frame(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 u = (helper - helper.dot(n) * n).normalized();
  Vec3 v = n.cross(u);
  return {u, v};
}

}  // namespace

PolarizationBasis polarization_basis(const Vec3& k_hat) {
  auto [u, v] = transverse_frame(k_hat);
  return {u, v};
}

double polarization_sum(const Vec3& a, const Vec3& b, const Vec3& k_hat) {
  const auto basis = polarization_basis(k_hat);
  return a.dot(basis.e1) * b.dot(basis.e1) + a.dot(basis.e2) * b.dot(basis.e2);
}

cplx d_oracle_complex(const DipoleGeometry& g, int n_theta, int n_phi) {
  // After the phi sum the integrand is a quadratic in cos(theta) times
  // exp(-i z cos(theta)); Gauss-Legendre converges once n exceeds ~z/2.
  if (n_theta <= 0) n_theta = 20 + static_cast<int>(std::ceil(g.z));
  n_phi = std::max(n_phi, 4);
  const auto rule = quad::gauss_legendre(n_theta);
  const auto [u, v] = transverse_frame(g.r_hat);
  const double dphi = 2.0 * pi / n_phi;

  cplx total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double xi = rule.nodes[i];
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - xi * xi));
    double ring = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = dphi * j;
      const Vec3 k_hat = xi * g.r_hat + sin_t * (std::cos(phi) * u + std::sin(phi) * v);
      ring += polarization_sum(g.p_d, g.p_a, k_hat);
    }
    total += rule.weights[i] * dphi * ring * std::exp(cplx(0.0, -g.z * xi));
  }
  return total;
}

double d_oracle(const DipoleGeometry& g, int n_theta, int n_phi) {
  return d_oracle_complex(g, n_theta, n_phi).real();
}

double dipole_factor_l(const Vec3& p_a, const Vec3& p_d, const Vec3& r_hat) {
  return p_d.dot(p_a) - r_hat.dot(p_d) * r_hat.dot(p_a);
}

double angular_average_l2(int order) { return kernels::l2_average_parallel(order); }

McEstimate angular_average_l2_mc(std::size_t samples, std::uint64_t seed) {
  auto gen = substream(seed, "angular_average_l2");
  double mean = 0.0, m2 = 0.0;
  for (std::size_t n = 1; n <= samples; ++n) {
    const Vec3 pa = random_unit(gen), pd = random_unit(gen), r = random_unit(gen);
    const double l = dipole_factor_l(pa, pd, r);
    const double x = l * l;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  McEstimate est;
  est.samples = samples;
  est.mean = mean;
  if (samples > 1) est.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return est;
}

NormalizationReport d_normalization_report(const std::vector<double>& z_values) {
  NormalizationReport rep;
  {
    DipoleGeometry ref;
    ref.p_a = ref.p_d = Vec3::UnitZ();
    ref.r_hat = Vec3::UnitX();
    ref.z = 0.0;
    rep.match_constant = d_func(ref) / d_oracle(ref);
  }

  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<std::pair<Vec3, Vec3>> dipoles = {
      {Vec3::UnitZ(), Vec3::UnitZ()},                     // parallel, normal to r
      {Vec3::UnitX(), Vec3::UnitX()},                     // parallel, along r
      {Vec3(s, 0.0, s), Vec3(s, 0.0, s)},                 // 45 degrees to r
      {Vec3(s, 0.0, s), Vec3(0.0, s, s)},                 // generic
  };

  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -std::numeric_limits<double>::infinity();
  for (double z : z_values) {
    for (const auto& [pa, pd] : dipoles) {
      DipoleGeometry g;
      g.p_a = pa;
      g.p_d = pd;
      g.r_hat = Vec3::UnitX();
      g.z = z;
      NormalizationSample smp;
      smp.z = z;
      smp.pd_dot_pa = pd.dot(pa);
      smp.rpd_rpa = g.r_hat.dot(pd) * g.r_hat.dot(pa);
      smp.printed = d_func(g);
      smp.oracle = d_oracle(g);
      rep.samples.push_back(smp);
      if (std::abs(smp.oracle) < 1e-3) continue;
      const double ratio = smp.printed / smp.oracle;
      rep.min_ratio = std::min(rep.min_ratio, ratio);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      rep.max_rel_spread = std::max(rep.max_rel_spread, std::abs(ratio / rep.match_constant - 1.0));
    }
  }
  rep.single_constant = rep.max_rel_spread <= 1e-6;
  return rep;
}

}  // namespace watched::geometry
