#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "monodtn/mesh.hpp"
#include "monodtn/wire.hpp"

using namespace monodtn;

namespace {

bool has_entry(const std::vector<std::string>& report, const std::string& needle) {
  return std::any_of(report.begin(), report.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

Mesh unit_square() {
  return Mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{{0, 1, 2}, 0}, {{0, 2, 3}, 0}});
}

}  // namespace

TEST_CASE("disk mesh area and validity") {
  const Mesh m = build_disk_mesh(1.0, 0.2);
  CHECK(validate(m).empty());
  CHECK(std::abs(m.total_area() - std::numbers::pi) / std::numbers::pi < 0.02);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) > 0.0);

  // Area error shrinks under refinement.
  double prev = std::abs(m.total_area() - std::numbers::pi);
  for (double h : {0.1, 0.05}) {
    const Mesh fine = build_disk_mesh(1.0, h);
    CHECK(validate(fine).empty());
    const double err = std::abs(fine.total_area() - std::numbers::pi);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("disk boundary is the full equally spaced polygon") {
  const Mesh m = build_disk_mesh(1.0, 0.1);
  const auto mass = boundary_mass(m);
  const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi / 0.1));
  CHECK(static_cast<int>(m.boundary_nodes().size()) == n);
  const double edge = 2.0 * std::sin(std::numbers::pi / n);
  for (double w : mass.weights) CHECK(w == doctest::Approx(edge).epsilon(1e-12));
}

TEST_CASE("inclusions carry their labels") {
  const auto geom = WireGeometry{};
  std::vector<InclusionShape> petals;
  for (const auto& d : petal_disks(geom)) petals.emplace_back(d);
  REQUIRE(petals.size() == 18);
  const Mesh m = build_disk_mesh(geom.radius, geom.target_h, petals);
  CHECK(validate(m).empty());
  CHECK(m.labels().size() == 19);

  const Mesh wire = build_wire_mesh(geom);
  CHECK(validate(wire).empty());
  CHECK(wire.labels().size() == 20);
}

TEST_CASE("inclusion touching the boundary is rejected") {
  CHECK_THROWS_WITH_AS(build_disk_mesh(1.0, 0.1, {DiskShape{{1.0, 0.0}, 0.2, 1}}),
                       doctest::Contains("outer boundary"), std::invalid_argument);
  CHECK_THROWS_AS(build_disk_mesh(1.0, 0.1, {DiskShape{{0.85, 0.0}, 0.2, 1}}), std::invalid_argument);
}

TEST_CASE("overlapping inclusions are rejected") {
  CHECK_THROWS_WITH_AS(
      build_disk_mesh(1.0, 0.1, {DiskShape{{0.0, 0.0}, 0.3, 1}, DiskShape{{0.4, 0.0}, 0.2, 2}}),
      doctest::Contains("overlap"), std::invalid_argument);
  const PolygonShape square{{{-0.2, -0.2}, {0.2, -0.2}, {0.2, 0.2}, {-0.2, 0.2}}, 1};
  CHECK_THROWS_AS(build_disk_mesh(1.0, 0.1, {square, DiskShape{{0.25, 0.0}, 0.1, 2}}),
                  std::invalid_argument);
  // Squares sharing an edge do not overlap.
  const PolygonShape right{{{0.2, -0.2}, {0.6, -0.2}, {0.6, 0.2}, {0.2, 0.2}}, 2};
  const Mesh m = build_disk_mesh(1.0, 0.1, {square, right});
  CHECK(validate(m).empty());
  CHECK(m.labels() == std::vector<int>{0, 1, 2});
}

TEST_CASE("mesh JSON round trip is bit exact") {
  const Mesh disk = build_disk_mesh(1.0, 0.15, {DiskShape{{0.1, 0.2}, 0.3, 1}});
  const auto path = std::filesystem::temp_directory_path() / "monodtn_roundtrip.json";
  save_mesh(disk, path);
  const Mesh back = load_mesh(path);
  std::filesystem::remove(path);
  REQUIRE(back.num_nodes() == disk.num_nodes());
  REQUIRE(back.num_triangles() == disk.num_triangles());
  for (std::size_t i = 0; i < disk.num_nodes(); ++i) {
    CHECK(back.nodes()[i].x == disk.nodes()[i].x);
    CHECK(back.nodes()[i].y == disk.nodes()[i].y);
  }
  for (std::size_t t = 0; t < disk.num_triangles(); ++t) {
    CHECK(back.triangles()[t].v == disk.triangles()[t].v);
    CHECK(back.triangles()[t].label == disk.triangles()[t].label);
  }
}

TEST_CASE("three-triangle mesh round trip keeps connectivity") {
  const Mesh m({{0, 0}, {1, 0}, {2, 0}, {0.5, 1}, {1.5, 1}},
               {{{0, 1, 3}, 0}, {{1, 4, 3}, 0}, {{1, 2, 4}, 0}});
  REQUIRE(validate(m).empty());
  const Mesh back = mesh_from_json_text(mesh_to_json_text(m));
  for (std::size_t t = 0; t < 3; ++t) CHECK(back.triangles()[t].v == m.triangles()[t].v);
}

TEST_CASE("load rejects invariant violations with the first failure") {
  CHECK_THROWS_WITH(mesh_from_json_text(R"({"nodes":[[0,0],[1,0],[0,1]],"triangles":[[0,2,1,0]]})"),
                    doctest::Contains("non-positive area at triangle 0"));
  // Reorientation on request.
  const Mesh fixed = mesh_from_json_text(R"({"nodes":[[0,0],[1,0],[0,1]],"triangles":[[0,2,1,0]]})",
                                         LoadOptions{.reorient = true});
  CHECK(fixed.signed_area(0) > 0.0);

  const std::string inclusion_on_boundary =
      R"({"nodes":[[0,0],[1,0],[1,1],[0,1]],"triangles":[[0,1,2,0],[0,2,3,1]]})";
  CHECK_THROWS_WITH(mesh_from_json_text(inclusion_on_boundary),
                    doctest::Contains("inclusion touches boundary"));
  CHECK_THROWS_WITH(mesh_from_json_text("{\"nodes\":[[0,0]"), doctest::Contains("malformed"));
  CHECK_THROWS_WITH(mesh_from_json_text(R"({"nodes":[],"triangles":[],"extra":1})"),
                    doctest::Contains("unknown key"));
}

TEST_CASE("boundary mass on the unit square") {
  const auto mass = boundary_mass(unit_square());
  REQUIRE(mass.weights.size() == 4);
  for (double w : mass.weights) CHECK(w == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mass.total() == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("boundary mass converges to the circle perimeter at second order") {
  double prev_err = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const double err = std::abs(boundary_mass(build_disk_mesh(1.0, h)).total() - 2.0 * std::numbers::pi);
    if (prev_err > 0.0) CHECK(prev_err / err > 3.5);
    prev_err = err;
  }
}

TEST_CASE("boundary mass is invariant under node renumbering") {
  const Mesh m = build_disk_mesh(1.0, 0.2, {DiskShape{{0.2, 0.0}, 0.3, 1}});
  std::vector<int> perm(m.num_nodes());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 rng(7);
  std::shuffle(perm.begin(), perm.end(), rng);
  const Mesh r = renumber_nodes(m, perm);
  CHECK(validate(r).empty());
  const auto w0 = boundary_mass(m);
  const auto w1 = boundary_mass(r);
  for (std::size_t i = 0; i < m.boundary_nodes().size(); ++i) {
    const int old_id = m.boundary_nodes()[i];
    const int new_id = perm[old_id];
    CHECK(w1.weights[r.boundary_slot(new_id)] == doctest::Approx(w0.weights[i]).epsilon(1e-14));
  }
}

TEST_CASE("validate reports duplicates and disconnected background") {
  CHECK(validate(build_disk_mesh(1.0, 0.25)).empty());

  const Mesh dup({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                 {{{0, 1, 2}, 0}, {{0, 2, 3}, 0}, {{1, 2, 0}, 0}});
  CHECK(has_entry(validate(dup), "duplicate element"));

  // Two squares joined only at a corner.
  const Mesh split({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 1}, {2, 2}, {1, 2}},
                   {{{0, 1, 2}, 0}, {{0, 2, 3}, 0}, {{2, 4, 5}, 0}, {{2, 5, 6}, 0}});
  CHECK(has_entry(validate(split), "background not connected"));
}

TEST_CASE("annulus and rectangle generators") {
  const Mesh ann = build_annulus_mesh(1.0, 2.0, 8, 48);
  CHECK(validate(ann).empty());
  const double exact = std::numbers::pi * 3.0;
  CHECK(std::abs(ann.total_area() - exact) / exact < 0.01);
  CHECK(ann.boundary_nodes().size() == 96);

  const Mesh strip = build_rectangle_mesh(
      1.0, 0.25, 8, 2, [](Point c) { return c.x < 0.5 ? 0 : 1; },
      ValidationOptions{.require_interior_inclusions = false});
  CHECK(validate(strip).empty());
  CHECK(strip.total_area() == doctest::Approx(0.25));
}
