#pragma once

#include <span>
#include <string>
#include <vector>

#include "monodtn/mesh.hpp"

namespace monodtn {

/// Nodal trace on Mesh::boundary_nodes() with zero dS-weighted mean.
struct BoundaryDatum {
  std::vector<double> values;
  std::string descriptor;

  BoundaryDatum scaled(double a) const;
  double max_abs() const;
};

/// Subtracts the weighted mean. Idempotent up to rounding.
BoundaryDatum project_zero_mean(std::span<const double> raw, const BoundaryMass& mass,
                                std::string descriptor = {});

/// Weighted mean relative to max|f| (0 for the zero datum).
double relative_weighted_mean(std::span<const double> values, const BoundaryMass& mass);

/// Evaluates an expression (see Expression) at the boundary nodes, then projects.
BoundaryDatum datum_from_expression(const Mesh& mesh, const std::string& expr);
std::vector<BoundaryDatum> datum_family(const Mesh& mesh, const std::vector<std::string>& specs);

/// a f + b g with the descriptor "a*(f)+b*(g)".
BoundaryDatum combine(double a, const BoundaryDatum& f, double b, const BoundaryDatum& g);

/// The ten boundary data of the wire tables, amplitudes multiplied by `scale`.
std::vector<std::string> wire_table_specs(double scale = 1.0);
/// Ten data of the same shapes sized for the unit disk.
std::vector<std::string> unit_disk_specs();

}  // namespace monodtn
