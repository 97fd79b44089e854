#pragma once

#include <memory>
#include <string>

namespace monodtn {

/// Scalar expression in x, y, r, theta (alias θ). Supports + - * / ^,
/// implicit multiplication ("100x", "2θ"), constants pi/π and the functions
/// sin cos tan exp log sqrt abs. Throws std::invalid_argument on bad input.
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text);

  double operator()(double x, double y) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace monodtn
