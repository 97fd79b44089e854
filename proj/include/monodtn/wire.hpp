#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "monodtn/constitutive.hpp"
#include "monodtn/mesh.hpp"

namespace monodtn {

/// Cross section of a petal-type superconducting wire. Petals are equal disks
/// on a concentric ring, labelled 1..petals counterclockwise from
/// petal_phase. The crack is a thin tangential rectangle in the matrix between
/// the ring and the outer surface, labelled petals + 1. It is always meshed so
/// that healthy and damaged wires share one triangulation.
struct WireGeometry {
  double radius = 0.6e-3;
  int petals = 18;
  double ring_radius = 0.35e-3;
  double petal_radius = 0.05e-3;
  double petal_phase_deg = 0.0;
  double crack_center_radius = 0.49e-3;
  double crack_angle_deg = 45.0;
  double crack_length = 0.14e-3;  // tangential
  double crack_width = 0.03e-3;   // radial
  double target_h = 0.02e-3;

  int crack_label() const { return petals + 1; }
};

struct WireMaterials {
  double matrix_sigma = 5.55e7;  // AgMg, S/m
  double jc = 8e9;               // A/m^2
  double e0 = 1e-4;              // V/m
  double n = 27.0;
  std::optional<double> reg_eps;
};

std::vector<DiskShape> petal_disks(const WireGeometry& geom);
PolygonShape crack_polygon(const WireGeometry& geom);
Mesh build_wire_mesh(const WireGeometry& geom);

/// Matrix (and crack region) linear, petals E-J.
MaterialMap healthy_wire(const WireGeometry& geom, const WireMaterials& mats);
/// Healthy wire with the crack region insulating.
MaterialMap cracked_wire(const WireGeometry& geom, const WireMaterials& mats);
/// Healthy wire with petal `petal` (1-based label) insulating.
MaterialMap damaged_petal_wire(const WireGeometry& geom, const WireMaterials& mats, int petal);

/// {"radius":..,"petals":..,...}; missing keys keep defaults, unknown keys throw.
WireGeometry wire_geometry_from_json(const nlohmann::json& doc);
WireMaterials wire_materials_from_json(const nlohmann::json& doc);

}  // namespace monodtn
