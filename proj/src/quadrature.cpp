#include "watched/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace watched::quad {

Rule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

Rule gauss_legendre(int n, double a, double b) {
  Rule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

Rule split_panels(int n, double a, double split, double b) {
  if (!(a < split && split < b)) {
    return gauss_legendre(n, a, b);
  }
  int n1 = static_cast<int>(std::lround(n * (split - a) / (b - a)));
  n1 = std::clamp(n1, 1, n - 1);
  const Rule left = gauss_legendre(n1, a, split);
  const Rule right = gauss_legendre(n - n1, split, b);
  Rule rule = left;
  rule.nodes.insert(rule.nodes.end(), right.nodes.begin(), right.nodes.end());
  rule.weights.insert(rule.weights.end(), right.weights.begin(), right.weights.end());
  return rule;
}

std::vector<std::pair<double, double>> weight_cells(const Rule& rule, double a) {
  std::vector<std::pair<double, double>> cells;
  cells.reserve(rule.size());
  double lo = a;
  for (double w : rule.weights) {
    cells.emplace_back(lo, lo + w);
    lo += w;
  }
  return cells;
}

}  // namespace watched::quad
