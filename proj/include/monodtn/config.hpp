#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monodtn/constitutive.hpp"
#include "monodtn/datum.hpp"
#include "monodtn/dtn.hpp"
#include "monodtn/mesh.hpp"

namespace monodtn {

/// Throws std::invalid_argument naming the first key of `doc` not in `allowed`.
void require_known_keys(const nlohmann::json& doc, std::initializer_list<const char*> allowed,
                        const std::string& context);

/// Mesh sources:
///   {"type":"disk","radius":1,"h":0.1,"inclusions":[{"type":"disk","center":[x,y],"radius":r,"label":1},
///                                                  {"type":"polygon","vertices":[[x,y],...],"label":2}]}
///   {"type":"annulus","r1":1,"r2":2,"radial":8,"angular":64}
///   {"type":"cells","radius":1,"half_width":0.6,"n":5,"h":0.08}
///   {"type":"wire", ...WireGeometry keys}
///   {"type":"file","path":"mesh.json","reorient":false}
Mesh mesh_from_spec(const nlohmann::json& spec);

/// Data: a list of expressions, or {"family":"unit_disk"} / {"family":"wire","scale":s},
/// or {"family":..., "only":[indices]}.
std::vector<std::string> data_specs_from_json(const nlohmann::json& spec);

/// {"tolerance", "max_newton", "armijo_c", "backtrack", "max_backtracks",
///  "reg_schedule", "stage_tolerance", "cg_tolerance", "max_cg"}
SolveOptions solve_options_from_json(const nlohmann::json& doc);

/// Materials: {"regions":{...}} or {"wire":"healthy"|"cracked"|"petal", "petal":k,
/// "geometry":{...}, "parameters":{...}}.
MaterialMap materials_from_spec(const nlohmann::json& spec);

}  // namespace monodtn
