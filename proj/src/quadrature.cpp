#include "sketchopt/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace sketchopt::quadrature {

GaussLegendreRule make_gauss_legendre(std::size_t points) {
  using Table = std::unique_ptr<gsl_integration_glfixed_table,
                                decltype(&gsl_integration_glfixed_table_free)>;
  Table table(gsl_integration_glfixed_table_alloc(points), &gsl_integration_glfixed_table_free);
  if (!table) throw std::runtime_error("gauss-legendre table allocation failed");
  GaussLegendreRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, i, &rule.nodes[i], &rule.weights[i], table.get());
  }
  return rule;
}

const EdgeRule& edge_rule() {
  static const EdgeRule rule = [] {
    const GaussLegendreRule gl = make_gauss_legendre(kEdgeNodes);
    const double half = std::numbers::pi / 4.0;  // theta in [0, pi/2]
    EdgeRule r;
    r.position.resize(kEdgeNodes);
    r.weight.resize(kEdgeNodes);
    for (std::size_t k = 0; k < kEdgeNodes; ++k) {
      const double theta = half * (gl.nodes[k] + 1.0);
      const double s = std::sin(theta);
      r.position[k] = s * s;
      r.weight[k] = half * gl.weights[k] * std::sin(2.0 * theta);
    }
    return r;
  }();
  return rule;
}

}  // namespace sketchopt::quadrature
