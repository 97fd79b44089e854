#include "monodtn/wire.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace monodtn {

namespace {

double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

std::vector<DiskShape> petal_disks(const WireGeometry& g) {
  if (g.petals < 1) throw std::invalid_argument("wire needs at least one petal");
  std::vector<DiskShape> out;
  out.reserve(g.petals);
  for (int k = 0; k < g.petals; ++k) {
    const double a = deg(g.petal_phase_deg) + 2.0 * std::numbers::pi * k / g.petals;
    out.push_back({{g.ring_radius * std::cos(a), g.ring_radius * std::sin(a)}, g.petal_radius, k + 1});
  }
  return out;
}

PolygonShape crack_polygon(const WireGeometry& g) {
  const double a = deg(g.crack_angle_deg);
  const Point radial{std::cos(a), std::sin(a)};
  const Point tangent{-radial.y, radial.x};
  const Point c{g.crack_center_radius * radial.x, g.crack_center_radius * radial.y};
  const double hl = 0.5 * g.crack_length, hw = 0.5 * g.crack_width;
  auto at = [&](double s, double t) {
    return Point{c.x + s * tangent.x + t * radial.x, c.y + s * tangent.y + t * radial.y};
  };
  return {{at(-hl, -hw), at(hl, -hw), at(hl, hw), at(-hl, hw)}, g.crack_label()};
}

Mesh build_wire_mesh(const WireGeometry& g) {
  std::vector<InclusionShape> shapes;
  for (const auto& d : petal_disks(g)) shapes.emplace_back(d);
  shapes.emplace_back(crack_polygon(g));
  return build_disk_mesh(g.radius, g.target_h, shapes);
}

MaterialMap healthy_wire(const WireGeometry& g, const WireMaterials& m) {
  MaterialMap out;
  const auto matrix = ConductivityModel::linear(m.matrix_sigma);
  const auto petal = ConductivityModel::ej_power_law(m.jc, m.e0, m.n, m.reg_eps);
  out.set(0, matrix);
  for (int k = 1; k <= g.petals; ++k) out.set(k, petal);
  out.set(g.crack_label(), matrix);
  return out;
}

MaterialMap cracked_wire(const WireGeometry& g, const WireMaterials& m) {
  return healthy_wire(g, m).with(g.crack_label(), ConductivityModel::pei());
}

MaterialMap damaged_petal_wire(const WireGeometry& g, const WireMaterials& m, int petal) {
  if (petal < 1 || petal > g.petals) throw std::invalid_argument("petal index out of range");
  return healthy_wire(g, m).with(petal, ConductivityModel::pei());
}

WireGeometry wire_geometry_from_json(const nlohmann::json& doc) {
  WireGeometry g;
  if (!doc.is_object()) throw std::invalid_argument("wire geometry must be an object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "radius") g.radius = v.get<double>();
    else if (key == "petals") g.petals = v.get<int>();
    else if (key == "ring_radius") g.ring_radius = v.get<double>();
    else if (key == "petal_radius") g.petal_radius = v.get<double>();
    else if (key == "petal_phase_deg") g.petal_phase_deg = v.get<double>();
    else if (key == "crack_center_radius") g.crack_center_radius = v.get<double>();
    else if (key == "crack_angle_deg") g.crack_angle_deg = v.get<double>();
    else if (key == "crack_length") g.crack_length = v.get<double>();
    else if (key == "crack_width") g.crack_width = v.get<double>();
    else if (key == "target_h") g.target_h = v.get<double>();
    else throw std::invalid_argument("unknown key \"" + key + "\" in wire geometry");
  }
  return g;
}

WireMaterials wire_materials_from_json(const nlohmann::json& doc) {
  WireMaterials m;
  if (!doc.is_object()) throw std::invalid_argument("wire materials must be an object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "matrix_sigma") m.matrix_sigma = v.get<double>();
    else if (key == "Jc") m.jc = v.get<double>();
    else if (key == "E0") m.e0 = v.get<double>();
    else if (key == "n") m.n = v.get<double>();
    else if (key == "reg_eps") m.reg_eps = v.get<double>();
    else throw std::invalid_argument("unknown key \"" + key + "\" in wire materials");
  }
  return m;
}

}  // namespace monodtn
