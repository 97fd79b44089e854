#include "monodtn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "monodtn/quadrature.hpp"

namespace monodtn {

RadialSolution annulus_radial_solution(double p, double sigma_bar, double e0, double r1, double r2, double u1,
                                       double u2) {
  if (!(p > 1.0)) throw std::invalid_argument("radial oracle needs p > 1");
  if (!(0.0 < r1 && r1 < r2)) throw std::invalid_argument("radial oracle needs 0 < R1 < R2");
  RadialSolution s;
  s.p = p;
  s.sigma_bar = sigma_bar;
  s.e0 = e0;
  s.r1 = r1;
  s.r2 = r2;
  s.u1 = u1;
  s.u2 = u2;
  if (p == 2.0) {
    s.a = (u2 - u1) / std::log(r2 / r1);
    s.b = u1 - s.a * std::log(r1);
  } else {
    s.beta = (p - 2.0) / (p - 1.0);
    s.a = (u2 - u1) / (std::pow(r2, s.beta) - std::pow(r1, s.beta));
    s.b = u1 - s.a * std::pow(r1, s.beta);
  }
  return s;
}

double RadialSolution::u(double r) const {
  return p == 2.0 ? a * std::log(r) + b : a * std::pow(r, beta) + b;
}

double RadialSolution::du(double r) const {
  return p == 2.0 ? a / r : a * beta * std::pow(r, beta - 1.0);
}

double RadialSolution::flux_constant(double r) const {
  const double e = std::abs(du(r));
  return r * sigma_bar * std::pow(e / e0, p - 2.0) * e;
}

double RadialSolution::energy() const {
  if (a == 0.0) return 0.0;
  if (p == 2.0) return std::numbers::pi * sigma_bar * a * a * std::log(r2 / r1);
  const double c = std::pow(e0, 2.0 - p) * sigma_bar / p * std::pow(std::abs(a * beta), p);
  return 2.0 * std::numbers::pi * c * (std::pow(r2, beta) - std::pow(r1, beta)) / beta;
}

double RadialSolution::energy_quadrature(int panels) const {
  const auto rule = gauss_legendre(8);
  double total = 0.0;
  const double h = (r2 - r1) / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = r1 + k * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double r = lo + h * rule.nodes[i];
      const double e = std::abs(du(r));
      const double q = sigma_bar * e0 * e0 * std::pow(e / e0, p) / p;
      total += h * rule.weights[i] * 2.0 * std::numbers::pi * r * q;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------

double invert_flux(const ConductivityModel& law, double j) {
  if (j < 0.0) throw std::invalid_argument("invert_flux needs j >= 0");
  if (j == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int k = 0; law.flux(hi) < j; ++k) {
    if (k > 2000) throw std::runtime_error("flux bracket failed (non-monotone law?)");
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (law.flux(mid) < j ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

StripSolution two_layer_strip(const ConductivityModel& lb, const ConductivityModel& la, double a, double v) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("layer split must lie in (0, 1)");
  if (!lb.has_monotone_flux() || !la.has_monotone_flux()) {
    throw std::invalid_argument("strip oracle needs strictly monotone fluxes");
  }
  StripSolution s;
  if (v == 0.0) return s;
  const double sign = v < 0.0 ? -1.0 : 1.0;
  const double va = std::abs(v);
  auto drop = [&](double j) { return a * invert_flux(lb, j) + (1.0 - a) * invert_flux(la, j); };
  double lo = 0.0, hi = std::max(lb.flux(va), la.flux(va));
  for (int k = 0; drop(hi) < va; ++k) {
    if (k > 2000) throw std::runtime_error("strip bracket failed");
    hi *= 2.0;
  }
  for (int k = 0; k < 80; ++k) {
    const double mid = 0.5 * (lo + hi);
    (drop(mid) < va ? lo : hi) = mid;
  }
  s.j = 0.5 * (lo + hi);
  s.e_b = invert_flux(lb, s.j);
  s.e_a = invert_flux(la, s.j);
  s.energy = a * lb.energy_density(s.e_b) + (1.0 - a) * la.energy_density(s.e_a);
  s.power = s.j * va;
  s.j *= sign;
  return s;
}

// ---------------------------------------------------------------------------

namespace {

double triangle_energy(const Mesh& mesh, const MaterialMap& materials, std::span<const double> u, int t) {
  const auto& tri = mesh.triangles()[t];
  const auto& law = materials.at(tri.label);
  if (law.kind() == LawKind::PEI) return 0.0;
  const Point& p0 = mesh.nodes()[tri.v[0]];
  const Point& p1 = mesh.nodes()[tri.v[1]];
  const Point& p2 = mesh.nodes()[tri.v[2]];
  // grad u from the 2x2 system on the edge vectors
  const double ax = p1.x - p0.x, ay = p1.y - p0.y, bx = p2.x - p0.x, by = p2.y - p0.y;
  const double du1 = u[tri.v[1]] - u[tri.v[0]], du2 = u[tri.v[2]] - u[tri.v[0]];
  const double det = ax * by - ay * bx;
  const double gx = (du1 * by - du2 * ay) / det;
  const double gy = (ax * du2 - bx * du1) / det;
  return 0.5 * det * law.energy_density(std::sqrt(gx * gx + gy * gy));
}

}  // namespace

double oracle_energy(const Mesh& mesh, const MaterialMap& materials, std::span<const double> u) {
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (materials.at(mesh.triangles()[t].label).kind() == LawKind::PEC) {
      throw std::invalid_argument("brute-force oracle does not support perfect conductors");
    }
    total += triangle_energy(mesh, materials, u, static_cast<int>(t));
  }
  return total;
}

BruteForceResult brute_force_min(const Mesh& mesh, const MaterialMap& materials, const BoundaryDatum& f,
                                 std::uint64_t seed, int restarts, int max_sweeps) {
  materials.check(mesh.labels());
  const std::size_t nn = mesh.num_nodes();
  std::vector<int> free_nodes;
  std::vector<char> conducting(nn, 0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto kind = materials.at(tri.label).kind();
    if (kind == LawKind::PEC) throw std::invalid_argument("brute-force oracle does not support perfect conductors");
    if (kind != LawKind::PEI) {
      for (int v : tri.v) conducting[v] = 1;
    }
  }
  for (std::size_t v = 0; v < nn; ++v) {
    if (conducting[v] && !mesh.is_boundary_node(static_cast<int>(v))) free_nodes.push_back(static_cast<int>(v));
  }
  if (free_nodes.size() > 60) throw std::invalid_argument("brute-force oracle is limited to 60 free nodes");

  std::vector<double> base(nn, std::numeric_limits<double>::quiet_NaN());
  double fmin = 0.0, fmax = 0.0;
  for (std::size_t i = 0; i < mesh.boundary_nodes().size(); ++i) {
    base[mesh.boundary_nodes()[i]] = f.values[i];
    fmin = std::min(fmin, f.values[i]);
    fmax = std::max(fmax, f.values[i]);
  }
  const double range = std::max(fmax - fmin, 1e-300);

  BruteForceResult best;
  best.energy = std::numeric_limits<double>::infinity();
  best.free_nodes = static_cast<int>(free_nodes.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(fmin, fmax);

  for (int restart = 0; restart < std::max(1, restarts); ++restart) {
    std::vector<double> u = base;
    for (int v : free_nodes) u[v] = restart == 0 ? 0.0 : dist(rng);
    double energy = oracle_energy(mesh, materials, u);
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
      double max_move = 0.0;
      for (int v : free_nodes) {
        const auto tris = mesh.node_triangles(v);
        auto local = [&](double val) {
          u[v] = val;
          double e = 0.0;
          for (int t : tris) e += triangle_energy(mesh, materials, u, t);
          return e;
        };
        const double old = u[v];
        double width = 0.25 * range;
        std::pair<double, double> r;
        for (int grow = 0; grow < 60; ++grow) {
          const double lo = old - width, hi = old + width;
          r = boost::math::tools::brent_find_minima(local, lo, hi, std::numeric_limits<double>::digits);
          // a minimizer on the bracket edge means the bracket was too narrow
          if (r.first > lo + 1e-3 * width && r.first < hi - 1e-3 * width) break;
          width *= 4.0;
        }
        const double before = local(old);
        if (r.second < before) {
          u[v] = r.first;
          max_move = std::max(max_move, std::abs(r.first - old));
        } else {
          u[v] = old;
        }
      }
      const double e_new = oracle_energy(mesh, materials, u);
      const bool stalled = energy - e_new <= 1e-15 * std::abs(e_new);
      energy = e_new;
      if (max_move <= 1e-13 * range || (stalled && max_move <= 1e-9 * range)) break;
    }
    if (energy < best.energy) {
      best.energy = energy;
      best.u = u;
      best.sweeps = sweep;
    }
  }
  return best;
}

}  // namespace monodtn
