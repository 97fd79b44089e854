#include "monodtn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "delaunay.hpp"

namespace monodtn {
namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double triangle_signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

struct Union {
  std::vector<int> parent;
  explicit Union(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles, ValidationOptions options)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), options_(options) {
  const int n = static_cast<int>(nodes_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int v : triangles_[t].v) {
      if (v < 0 || v >= n) {
        throw std::invalid_argument("node index out of range at triangle " + std::to_string(t));
      }
    }
  }
  build_topology();
}

void Mesh::build_topology() {
  const std::size_t n = nodes_.size();
  node_tri_offset_.assign(n + 1, 0);
  for (const auto& tri : triangles_) {
    for (int v : tri.v) ++node_tri_offset_[v + 1];
  }
  std::partial_sum(node_tri_offset_.begin(), node_tri_offset_.end(), node_tri_offset_.begin());
  node_tri_.assign(node_tri_offset_.back(), 0);
  std::vector<int> fill(node_tri_offset_.begin(), node_tri_offset_.end() - 1);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int v : triangles_[t].v) node_tri_[fill[v]++] = static_cast<int>(t);
  }

  // Directed half-edges; a boundary edge has no twin.
  std::map<EdgeKey, std::vector<std::pair<int, int>>> incidence;  // key -> (triangle, local)
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& v = triangles_[t].v;
    for (int k = 0; k < 3; ++k) {
      incidence[edge_key(v[k], v[(k + 1) % 3])].push_back({static_cast<int>(t), k});
    }
  }
  boundary_edges_.clear();
  non_manifold_edges_.clear();
  for (const auto& [key, uses] : incidence) {
    if (uses.size() == 1) {
      const auto [t, k] = uses.front();
      const auto& v = triangles_[t].v;
      int a = v[k], b = v[(k + 1) % 3];
      if (signed_area(t) < 0.0) std::swap(a, b);
      boundary_edges_.push_back({a, b, t});
    } else if (uses.size() > 2) {
      non_manifold_edges_.push_back(uses.front().first);
    }
  }
  std::set<int> bnodes;
  for (const auto& e : boundary_edges_) {
    bnodes.insert(e.a);
    bnodes.insert(e.b);
  }
  boundary_nodes_.assign(bnodes.begin(), bnodes.end());
  boundary_slot_.assign(n, -1);
  for (std::size_t i = 0; i < boundary_nodes_.size(); ++i) {
    boundary_slot_[boundary_nodes_[i]] = static_cast<int>(i);
  }
}

double Mesh::signed_area(std::size_t t) const {
  const auto& v = triangles_[t].v;
  return triangle_signed_area(nodes_[v[0]], nodes_[v[1]], nodes_[v[2]]);
}

Point Mesh::centroid(std::size_t t) const {
  const auto& v = triangles_[t].v;
  return {(nodes_[v[0]].x + nodes_[v[1]].x + nodes_[v[2]].x) / 3.0,
          (nodes_[v[0]].y + nodes_[v[1]].y + nodes_[v[2]].y) / 3.0};
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) sum += signed_area(t);
  return sum;
}

std::vector<int> Mesh::labels() const {
  std::set<int> s;
  for (const auto& t : triangles_) s.insert(t.label);
  return {s.begin(), s.end()};
}

std::vector<std::string> validate(const Mesh& mesh) {
  std::vector<std::string> report;
  const auto& tris = mesh.triangles();
  const int n = static_cast<int>(mesh.num_nodes());

  if (tris.empty()) report.emplace_back("mesh has no triangles");

  for (std::size_t t = 0; t < tris.size(); ++t) {
    const double a = mesh.signed_area(t);
    if (!(a > 0.0)) report.push_back("non-positive area at triangle " + std::to_string(t));
    if (tris[t].label < 0) report.push_back("negative region label at triangle " + std::to_string(t));
  }

  std::map<std::array<int, 3>, std::size_t> seen;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    auto key = tris[t].v;
    std::sort(key.begin(), key.end());
    if (key[0] == key[1] || key[1] == key[2]) {
      report.push_back("repeated vertex at triangle " + std::to_string(t));
      continue;
    }
    auto [it, inserted] = seen.emplace(key, t);
    if (!inserted) {
      report.push_back("duplicate element: triangle " + std::to_string(t) + " repeats triangle " +
                       std::to_string(it->second));
    }
  }

  for (int t : mesh.non_manifold_edges_) {
    report.push_back("edge shared by more than two triangles near triangle " + std::to_string(t));
  }

  // Closed boundary loops: every boundary node has one outgoing and one incoming edge.
  std::vector<int> out_deg(n, 0), in_deg(n, 0);
  for (const auto& e : mesh.boundary_edges()) {
    ++out_deg[e.a];
    ++in_deg[e.b];
  }
  for (int v : mesh.boundary_nodes()) {
    if (out_deg[v] != 1 || in_deg[v] != 1) {
      report.push_back("boundary is not a set of closed loops at node " + std::to_string(v));
      break;
    }
  }

  for (int v = 0; v < n; ++v) {
    if (mesh.node_triangles(v).empty()) {
      report.push_back("unreferenced node " + std::to_string(v));
      break;
    }
  }

  if (mesh.validation_options().require_interior_inclusions) {
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const auto& v = tris[t].v;
      if (tris[t].label >= 1 && std::any_of(v.begin(), v.end(), [&](int i) {
            return mesh.is_boundary_node(i);
          })) {
        report.push_back("inclusion touches boundary at triangle " + std::to_string(t));
        break;
      }
    }
  }

  // Background (label 0) must be edge-connected.
  std::vector<int> background;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (tris[t].label == 0) background.push_back(static_cast<int>(t));
  }
  if (background.empty()) {
    report.emplace_back("background region (label 0) is empty");
  } else {
    Union uf(tris.size());
    std::map<EdgeKey, int> first;
    for (int t : background) {
      const auto& v = tris[t].v;
      for (int k = 0; k < 3; ++k) {
        auto [it, inserted] = first.emplace(edge_key(v[k], v[(k + 1) % 3]), t);
        if (!inserted) uf.join(t, it->second);
      }
    }
    const int root = uf.find(background.front());
    for (int t : background) {
      if (uf.find(t) != root) {
        report.emplace_back("background not connected");
        break;
      }
    }
  }
  return report;
}

double BoundaryMass::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

BoundaryMass boundary_mass(const Mesh& mesh) {
  BoundaryMass mass;
  mass.weights.assign(mesh.boundary_nodes().size(), 0.0);
  const auto& pts = mesh.nodes();
  for (const auto& e : mesh.boundary_edges()) {
    const double half = 0.5 * distance(pts[e.a], pts[e.b]);
    mass.weights[mesh.boundary_slot(e.a)] += half;
    mass.weights[mesh.boundary_slot(e.b)] += half;
  }
  return mass;
}

// ---------------------------------------------------------------------------
// Shapes

namespace {

bool polygon_contains(const std::vector<Point>& poly, Point p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double shape_boundary_distance(const InclusionShape& shape, Point p) {
  if (const auto* d = std::get_if<DiskShape>(&shape)) {
    return std::abs(distance(p, d->center) - d->radius);
  }
  const auto& poly = std::get<PolygonShape>(shape).vertices;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    best = std::min(best, segment_distance(p, poly[j], poly[i]));
  }
  return best;
}

// Points along the shape boundary with spacing close to h.
std::vector<Point> shape_boundary_points(const InclusionShape& shape, double h) {
  std::vector<Point> pts;
  if (const auto* d = std::get_if<DiskShape>(&shape)) {
    const int m = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * d->radius / h)));
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * std::numbers::pi * k / m;
      pts.push_back({d->center.x + d->radius * std::cos(th), d->center.y + d->radius * std::sin(th)});
    }
    return pts;
  }
  const auto& poly = std::get<PolygonShape>(shape).vertices;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % poly.size()];
    const int m = std::max(1, static_cast<int>(std::ceil(distance(a, b) / h)));
    for (int k = 0; k < m; ++k) {
      const double s = static_cast<double>(k) / m;
      pts.push_back({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
    }
  }
  return pts;
}

double shape_max_radius(const InclusionShape& shape) {
  if (const auto* d = std::get_if<DiskShape>(&shape)) return std::hypot(d->center.x, d->center.y) + d->radius;
  double r = 0.0;
  for (const auto& v : std::get<PolygonShape>(shape).vertices) r = std::max(r, std::hypot(v.x, v.y));
  return r;
}

double shape_extent(const InclusionShape& shape) {
  if (const auto* d = std::get_if<DiskShape>(&shape)) return 2.0 * d->radius;
  const auto& poly = std::get<PolygonShape>(shape).vertices;
  double e = 0.0;
  for (const auto& a : poly) {
    for (const auto& b : poly) e = std::max(e, distance(a, b));
  }
  return e;
}

bool shapes_overlap(const InclusionShape& s1, const InclusionShape& s2, double h) {
  const auto* d1 = std::get_if<DiskShape>(&s1);
  const auto* d2 = std::get_if<DiskShape>(&s2);
  if (d1 && d2) return distance(d1->center, d2->center) < d1->radius + d2->radius;
  // Sampled test: any boundary sample of one shape strictly inside the other.
  const double spacing = std::min(h, std::min(shape_extent(s1), shape_extent(s2)) / 64.0);
  const double slack = 1e-9 * spacing;
  for (const auto& p : shape_boundary_points(s1, spacing)) {
    if (shape_contains(s2, p) && shape_boundary_distance(s2, p) > slack) return true;
  }
  for (const auto& p : shape_boundary_points(s2, spacing)) {
    if (shape_contains(s1, p) && shape_boundary_distance(s1, p) > slack) return true;
  }
  return false;
}

}  // namespace

bool shape_contains(const InclusionShape& shape, Point p) {
  if (const auto* d = std::get_if<DiskShape>(&shape)) return distance(p, d->center) < d->radius;
  return polygon_contains(std::get<PolygonShape>(shape).vertices, p);
}

int shape_label(const InclusionShape& shape) {
  return std::visit([](const auto& s) { return s.label; }, shape);
}

Mesh build_disk_mesh(double radius, double target_h, const std::vector<InclusionShape>& inclusions) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be positive");
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  if (target_h > radius) throw std::invalid_argument("target_h must not exceed the radius");

  for (std::size_t i = 0; i < inclusions.size(); ++i) {
    const auto& shape = inclusions[i];
    if (shape_label(shape) < 1) {
      throw std::invalid_argument("inclusion " + std::to_string(i) + " must carry a label >= 1");
    }
    if (const auto* poly = std::get_if<PolygonShape>(&shape); poly && poly->vertices.size() < 3) {
      throw std::invalid_argument("inclusion " + std::to_string(i) + " polygon needs 3 vertices");
    }
    if (const auto* d = std::get_if<DiskShape>(&shape); d && !(d->radius > 0.0)) {
      throw std::invalid_argument("inclusion " + std::to_string(i) + " radius must be positive");
    }
    if (shape_max_radius(shape) >= radius) {
      throw std::invalid_argument("inclusion " + std::to_string(i) +
                                  " touches or crosses the outer boundary");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (shapes_overlap(shape, inclusions[j], target_h)) {
        throw std::invalid_argument("inclusions " + std::to_string(j) + " and " + std::to_string(i) +
                                    " overlap");
      }
    }
  }

  std::vector<Point> pts;
  // Outer circle first, equally spaced so the boundary measure is symmetric.
  const int nb = std::max(12, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / target_h)));
  for (int k = 0; k < nb; ++k) {
    const double th = 2.0 * std::numbers::pi * k / nb;
    pts.push_back({radius * std::cos(th), radius * std::sin(th)});
  }

  // Inclusion boundaries, deduplicated where shapes share edges.
  const double merge_tol = 1e-6 * target_h;
  std::vector<Point> interface_pts;
  for (const auto& shape : inclusions) {
    for (const auto& p : shape_boundary_points(shape, target_h)) {
      bool dup = false;
      for (const auto& q : interface_pts) {
        if (distance(p, q) < merge_tol) {
          dup = true;
          break;
        }
      }
      if (!dup) interface_pts.push_back(p);
    }
  }
  pts.insert(pts.end(), interface_pts.begin(), interface_pts.end());

  // Hexagonal fill, kept away from every boundary and interface. A fixed
  // tiny jitter breaks the cocircular ties of the lattice.
  const double dy = target_h * std::sqrt(3.0) / 2.0;
  const int rows = static_cast<int>(std::ceil(radius / dy));
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  auto jitter = [&state, target_h]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return (static_cast<double>(state % 2001) / 1000.0 - 1.0) * 1e-3 * target_h;
  };
  for (int r = -rows; r <= rows; ++r) {
    const double y = r * dy;
    const double shift = (r % 2 != 0) ? 0.5 * target_h : 0.0;
    const int cols = static_cast<int>(std::ceil(radius / target_h)) + 1;
    for (int c = -cols; c <= cols; ++c) {
      Point p{c * target_h + shift, y};
      if (std::hypot(p.x, p.y) > radius - 0.6 * target_h) continue;
      bool near_interface = false;
      for (const auto& shape : inclusions) {
        if (shape_boundary_distance(shape, p) < 0.45 * target_h) {
          near_interface = true;
          break;
        }
      }
      if (near_interface) continue;
      p.x += jitter();
      p.y += jitter();
      pts.push_back(p);
    }
  }

  const auto raw = detail::delaunay_triangulate(pts);
  std::vector<Triangle> tris;
  tris.reserve(raw.size());
  for (const auto& v : raw) {
    Triangle t{v, 0};
    const Point c{(pts[v[0]].x + pts[v[1]].x + pts[v[2]].x) / 3.0,
                  (pts[v[0]].y + pts[v[1]].y + pts[v[2]].y) / 3.0};
    for (const auto& shape : inclusions) {
      if (shape_contains(shape, c)) {
        t.label = shape_label(shape);
        break;
      }
    }
    tris.push_back(t);
  }
  Mesh mesh(std::move(pts), std::move(tris));
  const auto report = validate(mesh);
  if (!report.empty()) {
    throw std::invalid_argument("generated disk mesh is invalid (" + report.front() +
                                "); reduce target_h or move inclusions away from the boundary");
  }
  return mesh;
}

Mesh build_rectangle_mesh(double width, double height, int nx, int ny,
                          const std::function<int(Point)>& labeler, ValidationOptions options) {
  if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("rectangle sides must be positive");
  if (nx < 1 || ny < 1) throw std::invalid_argument("rectangle needs at least one cell per direction");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) pts.push_back({width * i / nx, height * j / ny});
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Triangle> tris;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      tris.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, 0});
      tris.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, 0});
    }
  }
  if (labeler) {
    for (auto& t : tris) {
      const Point c{(pts[t.v[0]].x + pts[t.v[1]].x + pts[t.v[2]].x) / 3.0,
                    (pts[t.v[0]].y + pts[t.v[1]].y + pts[t.v[2]].y) / 3.0};
      t.label = labeler(c);
    }
  }
  return Mesh(std::move(pts), std::move(tris), options);
}

Mesh build_annulus_mesh(double r1, double r2, int radial, int angular) {
  if (!(r1 > 0.0) || !(r2 > r1)) throw std::invalid_argument("annulus needs 0 < r1 < r2");
  if (radial < 1 || angular < 3) throw std::invalid_argument("annulus resolution too small");
  std::vector<Point> pts;
  for (int i = 0; i <= radial; ++i) {
    const double r = r1 + (r2 - r1) * i / radial;
    for (int k = 0; k < angular; ++k) {
      // Alternate rings are rotated by half a sector for better shaped triangles.
      const double th = 2.0 * std::numbers::pi * (k + 0.5 * (i % 2)) / angular;
      pts.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  auto id = [angular](int i, int k) { return i * angular + ((k % angular) + angular) % angular; };
  std::vector<Triangle> tris;
  for (int i = 0; i < radial; ++i) {
    for (int k = 0; k < angular; ++k) {
      if (i % 2 == 0) {
        tris.push_back({{id(i, k), id(i, k + 1), id(i + 1, k)}, 0});
        tris.push_back({{id(i, k + 1), id(i + 1, k + 1), id(i + 1, k)}, 0});
      } else {
        tris.push_back({{id(i, k), id(i + 1, k + 1), id(i + 1, k)}, 0});
        tris.push_back({{id(i, k), id(i, k + 1), id(i + 1, k + 1)}, 0});
      }
    }
  }
  for (auto& t : tris) {
    const Point &a = pts[t.v[0]], &b = pts[t.v[1]], &c = pts[t.v[2]];
    if ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) < 0.0) std::swap(t.v[1], t.v[2]);
  }
  return Mesh(std::move(pts), std::move(tris));
}

Mesh renumber_nodes(const Mesh& mesh, std::span<const int> perm) {
  if (perm.size() != mesh.num_nodes()) throw std::invalid_argument("permutation size mismatch");
  std::vector<Point> pts(mesh.num_nodes());
  for (std::size_t i = 0; i < perm.size(); ++i) pts.at(perm[i]) = mesh.nodes()[i];
  std::vector<Triangle> tris = mesh.triangles();
  for (auto& t : tris) {
    for (int& v : t.v) v = perm[v];
  }
  return Mesh(std::move(pts), std::move(tris), mesh.validation_options());
}

// ---------------------------------------------------------------------------
// JSON IO

Mesh mesh_from_json_text(const std::string& text, LoadOptions options) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed mesh file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("triangles")) {
    throw std::invalid_argument("malformed mesh file: expected keys \"nodes\" and \"triangles\"");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "nodes" && key != "triangles") {
      throw std::invalid_argument("malformed mesh file: unknown key \"" + key + "\"");
    }
  }
  std::vector<Point> pts;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_array() || n.size() != 2 || !n[0].is_number() || !n[1].is_number()) {
      throw std::invalid_argument("malformed mesh file: node " + std::to_string(pts.size()) +
                                  " is not [x, y]");
    }
    pts.push_back({n[0].get<double>(), n[1].get<double>()});
  }
  std::vector<Triangle> tris;
  for (const auto& t : doc["triangles"]) {
    if (!t.is_array() || t.size() != 4) {
      throw std::invalid_argument("malformed mesh file: triangle " + std::to_string(tris.size()) +
                                  " is not [i, j, k, label]");
    }
    for (const auto& x : t) {
      if (!x.is_number_integer()) {
        throw std::invalid_argument("malformed mesh file: triangle " + std::to_string(tris.size()) +
                                    " has a non-integer entry");
      }
    }
    tris.push_back({{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()}, t[3].get<int>()});
  }
  if (options.reorient) {
    for (auto& t : tris) {
      const double a = triangle_signed_area(pts.at(t.v[0]), pts.at(t.v[1]), pts.at(t.v[2]));
      if (a < 0.0) std::swap(t.v[1], t.v[2]);
    }
  }
  Mesh mesh(std::move(pts), std::move(tris), options.validation);
  const auto report = validate(mesh);
  if (!report.empty()) throw std::invalid_argument("invalid mesh: " + report.front());
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path, LoadOptions options) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mesh file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return mesh_from_json_text(buf.str(), options);
}

std::string mesh_to_json_text(const Mesh& mesh) {
  nlohmann::json doc;
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  for (const auto& p : mesh.nodes()) nodes.push_back({p.x, p.y});
  auto& tris = doc["triangles"] = nlohmann::json::array();
  for (const auto& t : mesh.triangles()) tris.push_back({t.v[0], t.v[1], t.v[2], t.label});
  return doc.dump();
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file " + path.string());
  out << mesh_to_json_text(mesh) << '\n';
}

}  // namespace monodtn
