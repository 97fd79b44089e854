#pragma once

#include <string>
#include <vector>

namespace monodtn {

/// Rule on [0, 1]: sum_i weights[i] g(nodes[i]) ~ int_0^1 g. Nodes ascending.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order mapped affinely to [0, 1].
QuadratureRule gauss_legendre(int order);

/// How Gauss-Legendre nodes t are mapped to alpha in [0, 1].
///   Affine: alpha = t.
///   Graded: alpha = t^2 (weights carry the Jacobian 2t); clusters nodes at
///   alpha = 0 where power-law integrands alpha^(1/n) lose smoothness.
enum class QuadMap { Affine, Graded };

QuadratureRule alpha_rule(int order, QuadMap map);

QuadMap quad_map_from_string(const std::string& s);
std::string to_string(QuadMap map);

}  // namespace monodtn
