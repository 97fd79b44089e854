#include "monodtn/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace monodtn {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // P_n(x) and P_n'(x) by the three-term recurrence
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest root; map [-1,1] -> [0,1]
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[n - 1 - i] = 0.5 * w;
    rule.weights[i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

QuadratureRule alpha_rule(int order, QuadMap map) {
  QuadratureRule rule = gauss_legendre(order);
  if (map == QuadMap::Graded) {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = rule.nodes[i];
      rule.weights[i] *= 2.0 * t;
      rule.nodes[i] = t * t;
    }
  }
  return rule;
}

QuadMap quad_map_from_string(const std::string& s) {
  if (s == "affine") return QuadMap::Affine;
  if (s == "graded") return QuadMap::Graded;
  throw std::invalid_argument("unknown quadrature map \"" + s + "\" (affine|graded)");
}

std::string to_string(QuadMap map) { return map == QuadMap::Affine ? "affine" : "graded"; }

}  // namespace monodtn
