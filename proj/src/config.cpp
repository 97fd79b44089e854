#include "monodtn/config.hpp"

#include <algorithm>
#include <stdexcept>

#include "monodtn/imaging.hpp"
#include "monodtn/wire.hpp"

namespace monodtn {

void require_known_keys(const nlohmann::json& doc, std::initializer_list<const char*> allowed,
                        const std::string& context) {
  if (!doc.is_object()) throw std::invalid_argument(context + " must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw std::invalid_argument("unknown key \"" + key + "\" in " + context);
    }
  }
}

namespace {

Point point_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

InclusionShape shape_from(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "disk") {
    require_known_keys(j, {"type", "center", "radius", "label"}, "disk inclusion");
    return DiskShape{point_from(j.at("center")), j.at("radius").get<double>(), j.value("label", 1)};
  }
  if (type == "polygon") {
    require_known_keys(j, {"type", "vertices", "label"}, "polygon inclusion");
    PolygonShape p;
    for (const auto& v : j.at("vertices")) p.vertices.push_back(point_from(v));
    p.label = j.value("label", 1);
    return p;
  }
  throw std::invalid_argument("unknown inclusion type \"" + type + "\"");
}

}  // namespace

Mesh mesh_from_spec(const nlohmann::json& spec) {
  const std::string type = spec.at("type").get<std::string>();
  Mesh mesh;
  if (type == "disk") {
    require_known_keys(spec, {"type", "radius", "h", "inclusions"}, "disk mesh");
    std::vector<InclusionShape> inc;
    if (spec.contains("inclusions")) {
      for (const auto& s : spec.at("inclusions")) inc.push_back(shape_from(s));
    }
    mesh = build_disk_mesh(spec.value("radius", 1.0), spec.at("h").get<double>(), inc);
  } else if (type == "annulus") {
    require_known_keys(spec, {"type", "r1", "r2", "radial", "angular"}, "annulus mesh");
    mesh = build_annulus_mesh(spec.at("r1").get<double>(), spec.at("r2").get<double>(),
                              spec.at("radial").get<int>(), spec.at("angular").get<int>());
  } else if (type == "cells") {
    require_known_keys(spec, {"type", "radius", "half_width", "n", "h"}, "cell phantom mesh");
    mesh = build_cell_phantom_mesh(spec.value("radius", 1.0), spec.value("half_width", 0.6), spec.value("n", 5),
                                   spec.at("h").get<double>());
  } else if (type == "wire") {
    nlohmann::json geom = spec;
    geom.erase("type");
    mesh = build_wire_mesh(wire_geometry_from_json(geom));
  } else if (type == "file") {
    require_known_keys(spec, {"type", "path", "reorient"}, "mesh file");
    return load_mesh(spec.at("path").get<std::string>(), LoadOptions{.reorient = spec.value("reorient", false)});
  } else {
    throw std::invalid_argument("unknown mesh type \"" + type + "\"");
  }
  const auto problems = validate(mesh);
  if (!problems.empty()) throw std::invalid_argument("generated mesh invalid: " + problems.front());
  return mesh;
}

std::vector<std::string> data_specs_from_json(const nlohmann::json& spec) {
  if (spec.is_array()) {
    std::vector<std::string> out;
    for (const auto& s : spec) out.push_back(s.get<std::string>());
    if (out.empty()) throw std::invalid_argument("empty datum family");
    return out;
  }
  require_known_keys(spec, {"family", "scale", "only"}, "datum family");
  const std::string family = spec.at("family").get<std::string>();
  std::vector<std::string> all;
  if (family == "unit_disk") {
    all = unit_disk_specs();
  } else if (family == "wire") {
    all = wire_table_specs(spec.value("scale", 1.0));
  } else {
    throw std::invalid_argument("unknown datum family \"" + family + "\"");
  }
  if (!spec.contains("only")) return all;
  std::vector<std::string> out;
  for (const auto& i : spec.at("only")) {
    const int k = i.get<int>();
    if (k < 0 || k >= static_cast<int>(all.size())) throw std::invalid_argument("datum index out of range");
    out.push_back(all[k]);
  }
  return out;
}

SolveOptions solve_options_from_json(const nlohmann::json& doc) {
  require_known_keys(doc,
                     {"tolerance", "max_newton", "armijo_c", "backtrack", "max_backtracks", "reg_schedule",
                      "stage_tolerance", "cg_tolerance", "max_cg"},
                     "solver options");
  SolveOptions o;
  o.tolerance = doc.value("tolerance", o.tolerance);
  o.max_newton = doc.value("max_newton", o.max_newton);
  o.armijo_c = doc.value("armijo_c", o.armijo_c);
  o.backtrack = doc.value("backtrack", o.backtrack);
  o.max_backtracks = doc.value("max_backtracks", o.max_backtracks);
  if (doc.contains("reg_schedule")) o.reg_schedule = doc.at("reg_schedule").get<std::vector<double>>();
  o.stage_tolerance = doc.value("stage_tolerance", o.stage_tolerance);
  o.cg_tolerance = doc.value("cg_tolerance", o.cg_tolerance);
  o.max_cg = doc.value("max_cg", o.max_cg);
  if (!(o.tolerance > 0.0) || o.max_newton < 1 || !(o.backtrack > 0.0 && o.backtrack < 1.0)) {
    throw std::invalid_argument("solver options out of range");
  }
  return o;
}

MaterialMap materials_from_spec(const nlohmann::json& spec) {
  if (!spec.contains("wire")) return materials_from_json(spec);
  require_known_keys(spec, {"wire", "petal", "geometry", "parameters"}, "wire materials");
  const WireGeometry geom = wire_geometry_from_json(spec.value("geometry", nlohmann::json::object()));
  const WireMaterials mats = wire_materials_from_json(spec.value("parameters", nlohmann::json::object()));
  const std::string variant = spec.at("wire").get<std::string>();
  if (variant == "healthy") return healthy_wire(geom, mats);
  if (variant == "cracked") return cracked_wire(geom, mats);
  if (variant == "petal") return damaged_petal_wire(geom, mats, spec.value("petal", 1));
  throw std::invalid_argument("unknown wire variant \"" + variant + "\"");
}

}  // namespace monodtn
