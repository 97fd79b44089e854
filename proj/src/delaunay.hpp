#pragma once

#include <array>
#include <span>
#include <vector>

#include "monodtn/mesh.hpp"

namespace monodtn::detail {

/// Bowyer-Watson Delaunay triangulation of a point set. Returns
/// counterclockwise index triples covering the convex hull.
std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Point> points);

}  // namespace monodtn::detail
