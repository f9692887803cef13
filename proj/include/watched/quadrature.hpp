#pragma once

#include <vector>

namespace watched::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// n-point Gauss-Legendre rule mapped onto [a, b].
Rule gauss_legendre(int n, double a, double b);

// Two Gauss-Legendre panels [a, split] and [split, b] sharing n nodes in
// proportion to panel length. Nodes cluster on both sides of `split`.
Rule split_panels(int n, double a, double split, double b);

// Cell boundaries implied by the cumulative weights of a rule on [a, b]:
// node i owns [lo_i, hi_i] with hi_i - lo_i = w_i. Panels are handled by the
// caller concatenating per-panel results.
std::vector<std::pair<double, double>> weight_cells(const Rule& rule, double a);

}  // namespace watched::quad
