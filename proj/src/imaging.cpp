#include "monodtn/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <stdexcept>

#include "monodtn/parallel.hpp"

namespace monodtn {

CellGrid cells_from_labels(const Mesh& mesh, std::span<const int> labels) {
  std::map<int, int> index;
  CellGrid g;
  for (int label : labels) {
    if (label == 0) throw std::invalid_argument("cell label 0 is the background");
    if (!index.emplace(label, static_cast<int>(g.labels.size())).second) {
      throw std::invalid_argument("duplicate cell label " + std::to_string(label));
    }
    g.labels.push_back(label);
  }
  g.triangles.resize(labels.size());
  g.centers.assign(labels.size(), Point{});
  std::vector<double> area(labels.size(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto it = index.find(tri.label);
    if (it == index.end()) continue;
    for (int v : tri.v) {
      if (mesh.is_boundary_node(v)) {
        throw std::invalid_argument("cell " + std::to_string(tri.label) + " touches the boundary");
      }
    }
    const int k = it->second;
    g.triangles[k].push_back(static_cast<int>(t));
    const double a = mesh.signed_area(t);
    const Point c = mesh.centroid(t);
    g.centers[k].x += a * c.x;
    g.centers[k].y += a * c.y;
    area[k] += a;
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.triangles[k].empty()) throw std::invalid_argument("cell " + std::to_string(g.labels[k]) + " is empty");
    g.centers[k].x /= area[k];
    g.centers[k].y /= area[k];
  }
  return g;
}

Mesh build_cell_phantom_mesh(double radius, double half_width, int n, double target_h) {
  if (n < 1) throw std::invalid_argument("cell grid needs n >= 1");
  std::vector<InclusionShape> cells;
  const double w = 2.0 * half_width / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x0 = -half_width + i * w, y0 = -half_width + j * w;
      cells.emplace_back(PolygonShape{{{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + w}, {x0, y0 + w}}, j * n + i + 1});
    }
  }
  return build_disk_mesh(radius, target_h, cells);
}

std::string to_string(Contrast c) { return c == Contrast::PEI ? "PEI" : "PEC"; }

Contrast contrast_from_string(const std::string& s) {
  if (s == "PEI" || s == "pei") return Contrast::PEI;
  if (s == "PEC" || s == "pec") return Contrast::PEC;
  throw std::invalid_argument("unknown contrast '" + s + "'");
}

Measurements add_noise(Measurements m, double noise_rel, std::uint64_t seed) {
  if (!(noise_rel >= 0.0)) throw std::invalid_argument("noise_rel must be nonnegative");
  m.noise_rel = noise_rel;
  m.seed = seed;
  m.values = m.clean;
  if (noise_rel == 0.0) return m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : m.values) v *= 1.0 + noise_rel * u(rng);
  return m;
}

Measurements synth_measurements(const Mesh& mesh, const MaterialMap& truth, std::span<const BoundaryDatum> data,
                                const DtnOptions& opts, double noise_rel, std::uint64_t seed, int workers) {
  const EnergyProblem problem(mesh, truth);
  Measurements m;
  m.clean.resize(data.size());
  parallel_for(static_cast<int>(data.size()), workers,
               [&](int i) { m.clean[i] = average_dtn_power(problem, data[i], opts).avg_power; });
  for (const auto& f : data) m.data.push_back(f.descriptor);
  return add_noise(std::move(m), noise_rel, seed);
}

std::vector<std::vector<double>> cell_test_powers(const Mesh& mesh, const MaterialMap& background,
                                                  const CellGrid& grid, Contrast contrast,
                                                  std::span<const BoundaryDatum> data, const DtnOptions& opts,
                                                  int workers) {
  const int nk = static_cast<int>(grid.size());
  const int nd = static_cast<int>(data.size());
  std::vector<std::vector<double>> powers(nk, std::vector<double>(nd));
  // One problem per cell; (cell, datum) tasks share it.
  std::vector<EnergyProblem> problems;
  problems.reserve(nk);
  for (int k = 0; k < nk; ++k) {
    const auto& law = background.at(grid.labels[k]);
    if (law.is_structural()) {
      throw std::invalid_argument("background of cell " + std::to_string(grid.labels[k]) + " is " +
                                  to_string(law.kind()) + "; the contrast would not be ordered");
    }
    problems.emplace_back(mesh, background.with(grid.labels[k], contrast == Contrast::PEI
                                                                     ? ConductivityModel::pei()
                                                                     : ConductivityModel::pec()));
  }
  parallel_for(nk * nd, workers, [&](int t) {
    powers[t / nd][t % nd] = average_dtn_power(problems[t / nd], data[t % nd], opts).avg_power;
  });
  return powers;
}

double mpm_tolerance(double noise_rel) { return 3.0 * noise_rel + 1e-9; }

MpmResult mpm_from_tests(const Measurements& meas, const std::vector<std::vector<double>>& tests,
                         const CellGrid& grid, Contrast contrast) {
  if (tests.size() != grid.size()) throw std::invalid_argument("test powers do not match the cell grid");
  MpmResult r;
  r.contrast = contrast;
  r.data = meas.data;
  r.labels = grid.labels;
  r.noise_rel = meas.noise_rel;
  r.tol = mpm_tolerance(meas.noise_rel);
  for (const auto& row : tests) {
    if (row.size() != meas.values.size()) throw std::invalid_argument("datum family mismatch");
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < row.size(); ++f) {
      const double m = meas.values[f];
      if (m == 0.0) continue;  // f = 0 carries no information
      const double d = contrast == Contrast::PEI ? row[f] - m : m - row[f];
      s = std::min(s, d / std::abs(m));
    }
    r.indicators.push_back(s);
    r.mask.push_back(s >= -r.tol);
  }
  return r;
}

MpmResult mpm_scan(const Mesh& mesh, const MaterialMap& background, const Measurements& meas,
                   const CellGrid& grid, Contrast contrast, std::span<const BoundaryDatum> data,
                   const DtnOptions& opts, int workers) {
  if (meas.data.size() != data.size()) throw std::invalid_argument("datum family mismatch");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (meas.data[i] != data[i].descriptor) {
      throw std::invalid_argument("datum family mismatch at " + std::to_string(i) + ": '" + meas.data[i] +
                                  "' vs '" + data[i].descriptor + "'");
    }
  }
  return mpm_from_tests(meas, cell_test_powers(mesh, background, grid, contrast, data, opts, workers), grid,
                        contrast);
}

MaskMetrics mask_metrics(const MpmResult& r, std::span<const int> truth) {
  MaskMetrics m;
  m.contains = true;
  int inter = 0, flagged = 0;
  for (std::size_t k = 0; k < r.labels.size(); ++k) {
    const bool t = std::find(truth.begin(), truth.end(), r.labels[k]) != truth.end();
    flagged += r.mask[k];
    if (t && !r.mask[k]) m.contains = false;
    if (t && r.mask[k]) ++inter;
    if (!t && r.mask[k]) ++m.excess;
  }
  for (int label : truth) {
    if (std::find(r.labels.begin(), r.labels.end(), label) == r.labels.end()) m.contains = false;
  }
  const int uni = flagged + static_cast<int>(truth.size()) - inter;
  m.jaccard = uni > 0 ? static_cast<double>(inter) / uni : 1.0;
  return m;
}

nlohmann::json to_json(const MpmResult& r) {
  nlohmann::json j;
  j["contrast"] = to_string(r.contrast);
  j["data"] = r.data;
  j["tol"] = r.tol;
  j["noise_rel"] = r.noise_rel;
  auto cells = nlohmann::json::array();
  for (std::size_t k = 0; k < r.labels.size(); ++k) {
    cells.push_back({{"label", r.labels[k]}, {"indicator", r.indicators[k]}, {"flagged", r.mask[k] != 0}});
  }
  j["cells"] = std::move(cells);
  return j;
}

namespace {

// Blue (negative) through white to red (positive).
std::string diverging(double t) {
  t = std::clamp(t, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (t < 0) {
    r = g = static_cast<int>(std::lround(255 * (1.0 + t)));
  } else {
    g = b = static_cast<int>(std::lround(255 * (1.0 - t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_mpm_svg(std::ostream& os, const Mesh& mesh, const CellGrid& grid, const MpmResult& r) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& p : mesh.nodes()) {
    x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
  }
  const double size = 512.0, s = size / std::max(x1 - x0, y1 - y0);
  auto px = [&](Point p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", (p.x - x0) * s, (y1 - p.y) * s);
    return std::string(buf);
  };
  double smax = 0.0;
  for (double v : r.indicators) {
    if (std::isfinite(v)) smax = std::max(smax, std::abs(v));
  }
  if (smax == 0.0) smax = 1.0;

  std::vector<int> cell_of(mesh.num_triangles(), -1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (int t : grid.triangles[k]) cell_of[t] = static_cast<int>(k);
  }
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles()[t].v;
    const int k = cell_of[t];
    const std::string fill = k < 0 ? "#d0d0d0" : diverging(r.indicators[k] / smax);
    os << "<polygon points=\"" << px(mesh.nodes()[v[0]]) << ' ' << px(mesh.nodes()[v[1]]) << ' '
       << px(mesh.nodes()[v[2]]) << "\" fill=\"" << fill << "\" stroke=\"" << fill << "\" stroke-width=\"0.3\"/>\n";
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!r.mask[k]) continue;
    os << "<circle cx=\"" << (grid.centers[k].x - x0) * s << "\" cy=\"" << (y1 - grid.centers[k].y) * s
       << "\" r=\"4\" fill=\"black\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace monodtn
