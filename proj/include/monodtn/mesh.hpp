#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace monodtn {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Region label 0 is the background B; labels >= 1 are inclusion components.
struct Triangle {
  std::array<int, 3> v{};
  int label = 0;
};

struct BoundaryEdge {
  int a = 0;
  int b = 0;  // interior lies to the left of a -> b
  int triangle = 0;
};

struct ValidationOptions {
  /// Inclusion triangles may not share a vertex with the outer boundary.
  /// Layered test geometries (strips) switch this off.
  bool require_interior_inclusions = true;
};

/// Unstructured P1 triangulation with region labels. Immutable after
/// construction; derived boundary data is computed once in the constructor.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
       ValidationOptions options = {});

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  /// Boundary node ids in ascending order. Boundary data vectors are indexed
  /// in this order.
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  const ValidationOptions& validation_options() const { return options_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  bool is_boundary_node(int node) const { return boundary_slot_[node] >= 0; }
  /// Position of a boundary node in boundary_nodes(), or -1.
  int boundary_slot(int node) const { return boundary_slot_[node]; }

  /// Signed area (positive for counterclockwise triangles).
  double signed_area(std::size_t t) const;
  Point centroid(std::size_t t) const;
  double total_area() const;

  /// Triangles incident to a node.
  std::span<const int> node_triangles(int node) const {
    return {node_tri_.data() + node_tri_offset_[node],
            node_tri_.data() + node_tri_offset_[node + 1]};
  }

  /// Sorted list of distinct region labels.
  std::vector<int> labels() const;

 private:
  void build_topology();

  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  ValidationOptions options_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<int> boundary_nodes_;
  std::vector<int> boundary_slot_;
  std::vector<int> node_tri_offset_;
  std::vector<int> node_tri_;
  std::vector<int> non_manifold_edges_;
  friend std::vector<std::string> validate(const Mesh& mesh);
};

/// Lists every violated mesh invariant; empty iff the mesh is valid.
std::vector<std::string> validate(const Mesh& mesh);

/// Lumped boundary measure: half the summed lengths of the boundary edges
/// incident to each boundary node, indexed like Mesh::boundary_nodes().
struct BoundaryMass {
  std::vector<double> weights;
  double total() const;
};

BoundaryMass boundary_mass(const Mesh& mesh);

// ---------------------------------------------------------------------------
// Generators

struct DiskShape {
  Point center;
  double radius = 0.0;
  int label = 1;
};

/// Simple polygon, vertices in either orientation.
struct PolygonShape {
  std::vector<Point> vertices;
  int label = 1;
};

using InclusionShape = std::variant<DiskShape, PolygonShape>;

bool shape_contains(const InclusionShape& shape, Point p);
int shape_label(const InclusionShape& shape);

/// Delaunay mesh of the disk of given radius centred at the origin. Boundary
/// nodes are equally spaced on the circle; triangles are labelled by the
/// inclusion containing their centroid. Throws std::invalid_argument when an
/// inclusion touches the boundary or two inclusions overlap.
Mesh build_disk_mesh(double radius, double target_h,
                     const std::vector<InclusionShape>& inclusions = {});

/// Structured mesh of [0,width] x [0,height] with nx by ny
/// cells, each split along the same diagonal. Labels come from `labeler`
/// evaluated at triangle centroids (default: all zero).
Mesh build_rectangle_mesh(double width, double height, int nx, int ny,
                          const std::function<int(Point)>& labeler = {},
                          ValidationOptions options = {});

/// Structured polar mesh of the annulus r1 < r < r2 with `radial` layers and
/// `angular` sectors. Both circles are Dirichlet boundaries.
Mesh build_annulus_mesh(double r1, double r2, int radial, int angular);

/// Copy of `mesh` whose nodes are permuted by `perm` (new index = perm[old]).
Mesh renumber_nodes(const Mesh& mesh, std::span<const int> perm);

// ---------------------------------------------------------------------------
// JSON mesh files: {"nodes":[[x,y],...],"triangles":[[i,j,k,label],...]}

struct LoadOptions {
  /// Swap two indices of clockwise triangles instead of rejecting them.
  bool reorient = false;
  ValidationOptions validation{};
};

Mesh load_mesh(const std::filesystem::path& path, LoadOptions options = {});
Mesh mesh_from_json_text(const std::string& text, LoadOptions options = {});
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
std::string mesh_to_json_text(const Mesh& mesh);

}  // namespace monodtn
