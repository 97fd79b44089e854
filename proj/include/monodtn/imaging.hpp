#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "monodtn/dtn.hpp"

namespace monodtn {

/// Disjoint interior patches of triangles. A cell is tested by switching its
/// region label, so every cell is one label of the mesh.
struct CellGrid {
  std::vector<int> labels;
  std::vector<std::vector<int>> triangles;
  std::vector<Point> centers;

  std::size_t size() const { return labels.size(); }
};

/// One cell per label. Throws if a label is missing, a cell touches the outer
/// boundary, or a label is 0.
CellGrid cells_from_labels(const Mesh& mesh, std::span<const int> labels);

/// Disk of `radius` with an n x n grid of square cells covering
/// [-half_width, half_width]^2, labelled 1..n*n row by row from the bottom left.
Mesh build_cell_phantom_mesh(double radius, double half_width, int n, double target_h);

enum class Contrast { PEI, PEC };
std::string to_string(Contrast c);
Contrast contrast_from_string(const std::string& s);

struct Measurements {
  std::vector<std::string> data;
  std::vector<double> clean;
  std::vector<double> values;
  double noise_rel = 0.0;
  std::uint64_t seed = 0;
};

/// Averaged powers of the true configuration, each multiplied by
/// 1 + noise_rel U(-1, 1) with U drawn from mt19937_64(seed).
Measurements synth_measurements(const Mesh& mesh, const MaterialMap& truth,
                                std::span<const BoundaryDatum> data, const DtnOptions& opts,
                                double noise_rel, std::uint64_t seed, int workers = 1);
/// Re-noise clean powers (no solves).
Measurements add_noise(Measurements clean, double noise_rel, std::uint64_t seed);

/// powers[k][f]: averaged power with cell k switched to the contrast.
std::vector<std::vector<double>> cell_test_powers(const Mesh& mesh, const MaterialMap& background,
                                                  const CellGrid& grid, Contrast contrast,
                                                  std::span<const BoundaryDatum> data, const DtnOptions& opts,
                                                  int workers = 1);

struct MpmResult {
  Contrast contrast = Contrast::PEI;
  std::vector<std::string> data;
  std::vector<int> labels;
  /// s_k = min_f (test - meas) / meas for PEI, (meas - test) / meas for PEC.
  std::vector<double> indicators;
  std::vector<char> mask;  // s_k >= -tol
  double tol = 0.0;
  double noise_rel = 0.0;
};

/// tol = 3 noise_rel + 1e-9.
double mpm_tolerance(double noise_rel);

MpmResult mpm_from_tests(const Measurements& meas, const std::vector<std::vector<double>>& tests,
                         const CellGrid& grid, Contrast contrast);

MpmResult mpm_scan(const Mesh& mesh, const MaterialMap& background, const Measurements& meas,
                   const CellGrid& grid, Contrast contrast, std::span<const BoundaryDatum> data,
                   const DtnOptions& opts, int workers = 1);

struct MaskMetrics {
  bool contains = false;
  int excess = 0;
  double jaccard = 0.0;
};

/// `truth` lists cell labels.
MaskMetrics mask_metrics(const MpmResult& result, std::span<const int> truth);

nlohmann::json to_json(const MpmResult& result);
/// Heat map of s_k over the cells, background triangles grey.
void write_mpm_svg(std::ostream& os, const Mesh& mesh, const CellGrid& grid, const MpmResult& result);

}  // namespace monodtn
