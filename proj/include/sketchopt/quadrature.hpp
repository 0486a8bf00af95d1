#pragma once

#include <cstddef>
#include <vector>

namespace sketchopt::quadrature {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule make_gauss_legendre(std::size_t points);

inline constexpr std::size_t kEdgeNodes = 2000;

/// The fixed 2000-node rule pulled back through x = lo + (hi - lo) sin^2(theta),
/// theta in [0, pi/2]. Stores sin^2(theta_k) and weight_k * sin(2 theta_k).
struct EdgeRule {
  std::vector<double> position;
  std::vector<double> weight;
};

const EdgeRule& edge_rule();

/// Integral of f over [lo, hi] after the sine-squared substitution, which turns
/// sqrt((hi - x)(x - lo)) edge behaviour into a smooth integrand.
template <class F>
double integrate_edges(double lo, double hi, F&& f) {
  const EdgeRule& rule = edge_rule();
  const double width = hi - lo;
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.position.size(); ++k) {
    sum += rule.weight[k] * f(lo + width * rule.position[k]);
  }
  return sum * width;
}

}  // namespace sketchopt::quadrature
