#include "monodtn/datum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "monodtn/expression.hpp"

namespace monodtn {

BoundaryDatum BoundaryDatum::scaled(double a) const {
  BoundaryDatum out{values, descriptor};
  for (double& v : out.values) v *= a;
  return out;
}

double BoundaryDatum::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

BoundaryDatum project_zero_mean(std::span<const double> raw, const BoundaryMass& mass,
                                std::string descriptor) {
  if (raw.size() != mass.weights.size()) throw std::invalid_argument("datum size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) throw std::invalid_argument("non-finite boundary value");
    num += mass.weights[i] * raw[i];
    den += mass.weights[i];
  }
  const double mean = num / den;
  BoundaryDatum out{{raw.begin(), raw.end()}, std::move(descriptor)};
  for (double& v : out.values) v -= mean;
  return out;
}

double relative_weighted_mean(std::span<const double> values, const BoundaryMass& mass) {
  double num = 0.0, den = 0.0, m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += mass.weights[i] * values[i];
    den += mass.weights[i];
    m = std::max(m, std::abs(values[i]));
  }
  return m == 0.0 ? 0.0 : std::abs(num / den) / m;
}

BoundaryDatum datum_from_expression(const Mesh& mesh, const std::string& spec) {
  const Expression e = Expression::parse(spec);
  std::vector<double> raw;
  raw.reserve(mesh.boundary_nodes().size());
  for (int node : mesh.boundary_nodes()) raw.push_back(e(mesh.nodes()[node].x, mesh.nodes()[node].y));
  return project_zero_mean(raw, boundary_mass(mesh), spec);
}

std::vector<BoundaryDatum> datum_family(const Mesh& mesh, const std::vector<std::string>& specs) {
  std::vector<BoundaryDatum> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(datum_from_expression(mesh, s));
  return out;
}

BoundaryDatum combine(double a, const BoundaryDatum& f, double b, const BoundaryDatum& g) {
  if (f.values.size() != g.values.size()) throw std::invalid_argument("datum size mismatch");
  BoundaryDatum out;
  out.values.resize(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = a * f.values[i] + b * g.values[i];
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g*(", a);
  out.descriptor = buf + f.descriptor + ")";
  std::snprintf(buf, sizeof buf, "+%.6g*(", b);
  out.descriptor += buf + g.descriptor + ")";
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<std::string> wire_table_specs(double scale) {
  std::vector<std::string> out;
  for (double a : {100.0, 300.0, 500.0}) out.push_back(fmt(a * scale) + "x");
  for (double a : {0.1, 0.3, 0.5}) out.push_back(fmt(a * scale) + " sin(theta)");
  out.push_back(fmt(0.1 * scale) + " sin(theta) - " + fmt(0.2 * scale) + " cos(2 theta)");
  for (double a : {100.0, 300.0, 500.0}) out.push_back(fmt(a * scale) + " exp(x^2 + 2y)");
  return out;
}

std::vector<std::string> unit_disk_specs() {
  return {"x",      "3x",          "5x",          "sin(theta)",     "3 sin(theta)",
          "5 sin(theta)", "sin(theta) - 2 cos(2 theta)", "exp(x^2 + 2y)", "3 exp(x^2 + 2y)",
          "5 exp(x^2 + 2y)"};
}

}  // namespace monodtn
