#include <cmath>
#include <numbers>

#include "doctest.h"
#include "monodtn/datum.hpp"
#include "monodtn/expression.hpp"
#include "monodtn/quadrature.hpp"

using namespace monodtn;

TEST_CASE("expression grammar") {
  const double x = 0.3, y = -0.7;
  const double r = std::hypot(x, y), th = std::atan2(y, x);
  CHECK(Expression::parse("100x")(x, y) == doctest::Approx(30.0));
  CHECK(Expression::parse("2θ")(x, y) == doctest::Approx(2 * th));
  CHECK(Expression::parse("sin(theta) - 2 cos(2 theta)")(x, y) ==
        doctest::Approx(std::sin(th) - 2 * std::cos(2 * th)));
  CHECK(Expression::parse("exp(x^2 + 2y)")(x, y) == doctest::Approx(std::exp(x * x + 2 * y)));
  CHECK(Expression::parse("-x^2")(x, y) == doctest::Approx(-x * x));
  CHECK(Expression::parse("2^3^2")(x, y) == doctest::Approx(512.0));
  CHECK(Expression::parse("r*pi/π")(x, y) == doctest::Approx(r));
  CHECK(Expression::parse("sqrt(abs(log(exp(y))))")(x, y) == doctest::Approx(std::sqrt(0.7)));
  CHECK(Expression::parse("1e-3x")(x, y) == doctest::Approx(3e-4));
}

TEST_CASE("malformed expressions are rejected") {
  for (const char* bad : {"", "x +", "sin x", "foo(x)", "(x", "x)", "3 $ 4", "z"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Expression::parse(bad), std::invalid_argument);
  }
}

TEST_CASE("projected data have zero weighted mean") {
  const Mesh m = build_disk_mesh(1.0, 0.2);
  const auto mass = boundary_mass(m);
  for (const auto& spec : unit_disk_specs()) {
    CAPTURE(spec);
    const auto f = datum_from_expression(m, spec);
    CHECK(f.values.size() == m.boundary_nodes().size());
    CHECK(relative_weighted_mean(f.values, mass) < 1e-14);
    // Projection is idempotent.
    const auto g = project_zero_mean(f.values, mass);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == doctest::Approx(f.values[i]).epsilon(1e-13));
  }
  const auto c = datum_from_expression(m, "7");
  CHECK(c.max_abs() < 1e-13);
}

TEST_CASE("datum helpers") {
  const Mesh m = build_disk_mesh(1.0, 0.3);
  const auto f = datum_from_expression(m, "x");
  const auto g = datum_from_expression(m, "y");
  const auto h = combine(2.0, f, -1.0, g);
  CHECK(h.descriptor == "2*(x)+-1*(y)");
  for (std::size_t i = 0; i < h.values.size(); ++i) CHECK(h.values[i] == doctest::Approx(2 * f.values[i] - g.values[i]));
  CHECK(f.scaled(3.0).max_abs() == doctest::Approx(3.0 * f.max_abs()));
  CHECK_THROWS(project_zero_mean(std::vector<double>{1.0}, boundary_mass(m)));
  std::vector<double> nan(m.boundary_nodes().size(), 0.0);
  nan[0] = std::nan("");
  CHECK_THROWS(project_zero_mean(nan, boundary_mass(m)));
}

TEST_CASE("datum families") {
  const auto w = wire_table_specs();
  REQUIRE(w.size() == 10);
  CHECK(w[0] == "100x");
  CHECK(w[6] == "0.1 sin(theta) - 0.2 cos(2 theta)");
  CHECK(wire_table_specs(0.01)[9] == "5 exp(x^2 + 2y)");
  CHECK(unit_disk_specs().size() == 10);
  for (const auto& s : w) CHECK_NOTHROW(Expression::parse(s));
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 8, 16, 32}) {
    CAPTURE(n);
    const auto rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
    for (int i = 1; i < n; ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
  }
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("graded map carries its Jacobian") {
  const auto rule = alpha_rule(12, QuadMap::Graded);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::sqrt(rule.nodes[i]);
  CHECK(s == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(quad_map_from_string("graded") == QuadMap::Graded);
  CHECK(to_string(QuadMap::Affine) == "affine");
  CHECK_THROWS(quad_map_from_string("cubic"));
}
