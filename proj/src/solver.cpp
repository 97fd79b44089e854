#include "monodtn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace monodtn {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// DofMap

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

DofMap::DofMap(const Mesh& mesh, const MaterialMap& materials) {
  const auto labels = mesh.labels();
  materials.check(labels);
  const std::size_t nn = mesh.num_nodes(), nt = mesh.num_triangles();

  std::vector<char> in_pec(nn, 0), touches_active(nn, 0);
  UnionFind uf(nn);
  active_mask_.assign(nt, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    const LawKind kind = materials.at(tri.label).kind();
    if (kind == LawKind::PEC) {
      for (int v : tri.v) in_pec[v] = 1;
      uf.unite(tri.v[0], tri.v[1]);
      uf.unite(tri.v[0], tri.v[2]);
    } else if (kind != LawKind::PEI) {
      active_mask_[t] = 1;
      active_.push_back(static_cast<int>(t));
      for (int v : tri.v) touches_active[v] = 1;
    }
  }

  node_dof_.assign(nn, kMasked);
  pec_comp_.assign(nn, -1);
  std::vector<int> root_comp(nn, -1);
  for (std::size_t v = 0; v < nn; ++v) {
    const int node = static_cast<int>(v);
    if (in_pec[v]) {
      if (mesh.is_boundary_node(node)) {
        throw std::invalid_argument("perfect conductor touches the boundary at node " + std::to_string(v));
      }
      const int root = uf.find(node);
      if (root_comp[root] < 0) {
        root_comp[root] = static_cast<int>(pec_dof_.size());
        pec_dof_.push_back(num_free_++);
      }
      pec_comp_[v] = root_comp[root];
      node_dof_[v] = pec_dof_[root_comp[root]];
    } else if (mesh.is_boundary_node(node)) {
      node_dof_[v] = kDirichlet;
    } else if (touches_active[v]) {
      node_dof_[v] = num_free_++;
    }
  }
  // A conductor with no conducting neighbour carries no energy and is undetermined.
  std::vector<char> pec_touched(pec_dof_.size(), 0);
  for (std::size_t v = 0; v < nn; ++v) {
    if (pec_comp_[v] >= 0 && touches_active[v]) pec_touched[pec_comp_[v]] = 1;
  }
  for (std::size_t c = 0; c < pec_touched.size(); ++c) {
    if (!pec_touched[c]) throw std::invalid_argument("perfect conductor component is isolated");
  }
}

std::array<double, 2> PotentialField::gradient(std::size_t t) const {
  const auto& tri = mesh->triangles()[t];
  const auto& p = mesh->nodes();
  const Point a = p[tri.v[0]], b = p[tri.v[1]], c = p[tri.v[2]];
  const double u0 = u[tri.v[0]], u1 = u[tri.v[1]], u2 = u[tri.v[2]];
  if (std::isnan(u0) || std::isnan(u1) || std::isnan(u2)) return {0.0, 0.0};
  const double twice = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  const double gx = (u0 * (b.y - c.y) + u1 * (c.y - a.y) + u2 * (a.y - b.y)) / twice;
  const double gy = (u0 * (c.x - b.x) + u1 * (a.x - c.x) + u2 * (b.x - a.x)) / twice;
  return {gx, gy};
}

// ---------------------------------------------------------------------------
// EnergyProblem

struct EnergyProblem::Eval {
  double energy = 0.0;
  std::vector<double> grad;
  std::vector<double> grad_abs;
  std::vector<double> grad_round;  // rounding error estimate of grad
};

EnergyProblem::EnergyProblem(const Mesh& mesh, MaterialMap materials)
    : mesh_(&mesh), materials_(std::move(materials)), dofs_(mesh, materials_) {
  const std::size_t nt = mesh.num_triangles();
  geo_.resize(nt);
  tri_law_.assign(nt, -1);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& p = mesh.nodes();
    const Point a = p[tri.v[0]], b = p[tri.v[1]], c = p[tri.v[2]];
    const double twice = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    geo_[t].area = 0.5 * twice;
    geo_[t].gx = {(b.y - c.y) / twice, (c.y - a.y) / twice, (a.y - b.y) / twice};
    geo_[t].gy = {(c.x - b.x) / twice, (a.x - c.x) / twice, (b.x - a.x) / twice};
    if (!dofs_.is_active(static_cast<int>(t))) continue;
    auto it = std::find(law_labels_.begin(), law_labels_.end(), tri.label);
    if (it == law_labels_.end()) {
      law_labels_.push_back(tri.label);
      it = law_labels_.end() - 1;
    }
    tri_law_[t] = static_cast<int>(it - law_labels_.begin());
  }

  std::vector<std::pair<int, int>> entries;
  for (int t : dofs_.active_triangles()) {
    for (int i : mesh.triangles()[t].v) {
      for (int j : mesh.triangles()[t].v) {
        const int di = dofs_.node_dof(i), dj = dofs_.node_dof(j);
        if (di >= 0 && dj >= 0) entries.emplace_back(di, dj);
      }
    }
  }
  pattern_ = CsrMatrix(dofs_.num_free(), std::move(entries));
  slots_.assign(nt, {});
  for (int t : dofs_.active_triangles()) {
    const auto& v = mesh.triangles()[t].v;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int di = dofs_.node_dof(v[i]), dj = dofs_.node_dof(v[j]);
        slots_[t][3 * i + j] = (di >= 0 && dj >= 0) ? pattern_.slot(di, dj) : -1;
      }
    }
  }
}

std::vector<ConductivityModel> EnergyProblem::laws_at(double factor) const {
  std::vector<ConductivityModel> out;
  out.reserve(law_labels_.size());
  for (int label : law_labels_) {
    const auto& m = materials_.at(label);
    out.push_back(factor == 1.0 ? m : m.with_reg_eps(m.reg_eps() * factor));
  }
  return out;
}

EnergyProblem::Eval EnergyProblem::evaluate(std::span<const double> u,
                                            const std::vector<ConductivityModel>& laws, bool hessian,
                                            CsrMatrix* h) const {
  Eval ev;
  ev.grad.assign(dofs_.num_free(), 0.0);
  ev.grad_abs.assign(dofs_.num_free(), 0.0);
  ev.grad_round.assign(dofs_.num_free(), 0.0);
  if (hessian) h->zero();
  auto hv = hessian ? h->values() : std::span<double>{};
  for (int t : dofs_.active_triangles()) {
    const auto& v = mesh_->triangles()[t].v;
    const auto& g = geo_[t];
    const auto& law = laws[tri_law_[t]];
    const double gx = u[v[0]] * g.gx[0] + u[v[1]] * g.gx[1] + u[v[2]] * g.gx[2];
    const double gy = u[v[0]] * g.gy[0] + u[v[1]] * g.gy[1] + u[v[2]] * g.gy[2];
    const double e = std::hypot(gx, gy);
    ev.energy += g.area * law.energy_density(e);
    const double s = law.sigma(e);
    // Cancellation error in the element gradient, amplified by the stiffest
    // tangent. Dominates inside nearly perfect conductors.
    double du = 0.0;
    for (int i = 0; i < 3; ++i) du += std::abs(u[v[i]]) * (std::abs(g.gx[i]) + std::abs(g.gy[i]));
    const double stiff = g.area * std::max(s, law.dflux(e)) * du * std::numeric_limits<double>::epsilon();
    std::array<double, 3> proj{};
    for (int i = 0; i < 3; ++i) {
      proj[i] = gx * g.gx[i] + gy * g.gy[i];
      const int d = dofs_.node_dof(v[i]);
      if (d < 0) continue;
      const double c = g.area * s * proj[i];
      ev.grad[d] += c;
      ev.grad_abs[d] += std::abs(c);
      ev.grad_round[d] += stiff * std::hypot(g.gx[i], g.gy[i]);
    }
    if (!hessian) continue;
    const double aniso = e > 0.0 ? (law.dflux(e) - s) / (e * e) : 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int slot = slots_[t][3 * i + j];
        if (slot < 0) continue;
        const double iso = g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j];
        hv[slot] += g.area * (s * iso + aniso * proj[i] * proj[j]);
      }
    }
  }
  return ev;
}

std::vector<double> EnergyProblem::expand(std::span<const double> x,
                                          std::span<const double> fb) const {
  std::vector<double> u(mesh_->num_nodes(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t v = 0; v < u.size(); ++v) {
    const int d = dofs_.node_dof(static_cast<int>(v));
    if (d >= 0) u[v] = x[d];
    else if (d == DofMap::kDirichlet) u[v] = fb[mesh_->boundary_slot(static_cast<int>(v))];
  }
  return u;
}

std::vector<double> EnergyProblem::restrict(std::span<const double> u) const {
  std::vector<double> x(dofs_.num_free(), 0.0);
  std::vector<char> seen(x.size(), 0);
  for (std::size_t v = 0; v < u.size(); ++v) {
    const int d = dofs_.node_dof(static_cast<int>(v));
    if (d >= 0 && !seen[d]) {
      x[d] = u[v];
      seen[d] = 1;
    }
  }
  return x;
}

double EnergyProblem::energy(std::span<const double> u) const {
  return evaluate(u, laws_at(1.0), false, nullptr).energy;
}

std::vector<double> EnergyProblem::gradient(std::span<const double> u) const {
  return evaluate(u, laws_at(1.0), false, nullptr).grad;
}

std::array<double, 2> EnergyProblem::triangle_gradient(std::span<const double> u, std::size_t t) const {
  if (!dofs_.is_active(static_cast<int>(t))) return {0.0, 0.0};
  const auto& v = mesh_->triangles()[t].v;
  const auto& g = geo_[t];
  return {u[v[0]] * g.gx[0] + u[v[1]] * g.gx[1] + u[v[2]] * g.gx[2],
          u[v[0]] * g.gy[0] + u[v[1]] * g.gy[1] + u[v[2]] * g.gy[2]};
}

std::vector<double> EnergyProblem::harmonic_extension(std::span<const double> fb) const {
  const std::vector<ConductivityModel> unit(law_labels_.size(), ConductivityModel::linear(1.0));
  return linear_extension(fb, unit);
}

std::vector<double> EnergyProblem::reference_extension(std::span<const double> fb) const {
  std::vector<ConductivityModel> ref;
  for (int label : law_labels_) {
    const auto& m = materials_.at(label);
    ref.push_back(ConductivityModel::linear(m.sigma(m.kind() == LawKind::Tabulated ? 0.0 : m.e0())));
  }
  return linear_extension(fb, ref);
}

std::vector<double> EnergyProblem::linear_extension(std::span<const double> fb,
                                                    const std::vector<ConductivityModel>& unit) const {
  std::vector<double> x(dofs_.num_free(), 0.0);
  CsrMatrix h = pattern_;
  const auto u0 = expand(x, fb);
  const Eval ev = evaluate(u0, unit, true, &h);
  std::vector<double> rhs(ev.grad.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -ev.grad[i];
  pcg(h, rhs, x, 1e-12, 10 * static_cast<int>(x.size()) + 100);
  return expand(x, fb);
}

namespace {

constexpr double kRoundingMargin = 10.0;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

void log_line(std::ostream* os, int stage, double reg_factor, int it, const char* kind, double energy,
              double gnorm, double scale, double step, int cg) {
  if (!os) return;
  *os << "{\"stage\":" << stage << ",\"reg_factor\":" << fmt17(reg_factor) << ",\"iteration\":" << it
      << ",\"kind\":\"" << kind << "\",\"energy\":" << fmt17(energy)
      << ",\"grad_norm\":" << fmt17(gnorm) << ",\"grad_scale\":" << fmt17(scale)
      << ",\"step\":" << fmt17(step) << ",\"cg_iterations\":" << cg << "}\n";
}

}  // namespace

void EnergyProblem::run_stage(std::vector<double>& x, std::span<const double> fb,
                              const std::vector<ConductivityModel>& laws, double tol,
                              const SolveOptions& opts, int stage, double reg_factor, SolveStats& stats,
                              bool final_stage) const {
  const int n = dofs_.num_free();
  CsrMatrix h = pattern_;
  std::vector<double> u = expand(x, fb);
  std::vector<double> d(n), trial_x(n), rhs(n);
  auto energy_at = [&](const std::vector<double>& xx) {
    const auto uu = expand(xx, fb);
    return evaluate(uu, laws, false, nullptr).energy;
  };
  // Rounding slack for energy comparisons.
  const double eps_rel = 64.0 * std::numeric_limits<double>::epsilon();

  for (int it = 0;; ++it) {
    const Eval ev = evaluate(u, laws, true, &h);
    const double gnorm = norm2(ev.grad);
    const double scale = norm2(ev.grad_abs);
    stats.grad_norm = gnorm;
    stats.grad_scale = scale;
    stats.grad_floor = kRoundingMargin * norm2(ev.grad_round);
    if (final_stage) stats.energy_history.push_back(ev.energy);
    // Componentwise: the part of g below its rounding estimate does not count.
    double resolved = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = std::max(std::abs(ev.grad[i]) - kRoundingMargin * ev.grad_round[i], 0.0);
      resolved += r * r;
    }
    resolved = std::sqrt(resolved);
    if (resolved <= tol * scale || scale == 0.0 || n == 0) {
      log_line(opts.log, stage, reg_factor, it, "converged", ev.energy, gnorm, scale, 0.0, 0);
      return;
    }
    if (it >= opts.max_newton) {
      throw SolverError("no convergence after " + std::to_string(opts.max_newton) +
                            " Newton iterations (gradient norm " + fmt17(gnorm) + ", scale " + fmt17(scale) + ")",
                        gnorm);
    }

    // Inexact Newton direction.
    for (int i = 0; i < n; ++i) rhs[i] = -ev.grad[i];
    std::fill(d.begin(), d.end(), 0.0);
    const double forcing = std::clamp(std::sqrt(gnorm / scale), 1e-12, opts.cg_tolerance);
    const CgResult cg = pcg(h, rhs, d, forcing, opts.max_cg);
    stats.cg_iterations += cg.iterations;
    double slope = 0.0;
    for (int i = 0; i < n; ++i) slope += ev.grad[i] * d[i];

    // Backtracking with safeguarded quadratic interpolation.
    auto line_search = [&](double& step) {
      step = 1.0;
      for (int k = 0; k <= opts.max_backtracks; ++k) {
        for (int i = 0; i < n; ++i) trial_x[i] = x[i] + step * d[i];
        const double e_new = energy_at(trial_x);
        if (e_new <= ev.energy + opts.armijo_c * step * slope + eps_rel * std::abs(ev.energy)) {
          return true;
        }
        const double curv = e_new - ev.energy - slope * step;
        double next = curv > 0.0 ? -slope * step * step / (2.0 * curv) : opts.backtrack * step;
        if (!std::isfinite(next)) next = opts.backtrack * step;
        step = std::clamp(next, 0.1 * step, opts.backtrack * step);
      }
      return false;
    };

    double step = 0.0;
    bool ok = slope < 0.0 && line_search(step);
    const char* kind = "newton";
    if (!ok) {
      // Jacobi-preconditioned steepest descent.
      const auto diag = h.diagonal();
      slope = 0.0;
      for (int i = 0; i < n; ++i) {
        d[i] = -ev.grad[i] / (diag[i] > 0.0 ? diag[i] : 1.0);
        slope += ev.grad[i] * d[i];
      }
      ok = line_search(step);
      kind = "gradient";
      if (ok) ++stats.gradient_steps;
    } else {
      ++stats.newton_iterations;
    }
    log_line(opts.log, stage, reg_factor, it, kind, ev.energy, gnorm, scale, ok ? step : 0.0, cg.iterations);
    if (!ok) {
      // Stalled at the rounding floor of the energy: accept if close.
      if (resolved <= 1e3 * tol * scale) return;
      throw SolverError("line search stalled (gradient norm " + fmt17(gnorm) + ", scale " + fmt17(scale) + ")",
                        gnorm);
    }
    x = trial_x;
    u = expand(x, fb);
  }
}

PotentialField EnergyProblem::solve(const BoundaryDatum& f, const SolveOptions& opts,
                                    std::span<const double> initial) const {
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (f.values.size() != mesh_->boundary_nodes().size()) {
    throw std::invalid_argument("boundary datum does not match the mesh boundary");
  }
  std::vector<double> x;
  if (!initial.empty()) {
    if (initial.size() != mesh_->num_nodes()) throw std::invalid_argument("initial guess size mismatch");
    x = restrict(initial);
    for (double& v : x) {
      if (!std::isfinite(v)) v = 0.0;
    }
  } else {
    x = restrict(reference_extension(f.values));
  }

  bool regularized = false;
  for (int label : law_labels_) regularized = regularized || materials_.at(label).reg_eps() > 0.0;

  SolveStats stats;
  int stage = 0;
  if (regularized) {
    for (double factor : opts.reg_schedule) {
      if (factor <= 1.0) continue;
      run_stage(x, f.values, laws_at(factor), std::max(opts.stage_tolerance, opts.tolerance), opts, stage++,
                factor, stats, false);
    }
  }
  run_stage(x, f.values, laws_at(1.0), opts.tolerance, opts, stage, 1.0, stats, true);

  PotentialField field;
  field.mesh = mesh_;
  field.materials = materials_;
  field.u = expand(x, f.values);
  for (int c = 0; c < dofs_.num_pec_components(); ++c) field.pec_values.push_back(x[dofs_.pec_dof(c)]);
  field.stats = std::move(stats);
  return field;
}

PotentialField solve(const Mesh& mesh, const MaterialMap& materials, const BoundaryDatum& f,
                     const SolveOptions& opts) {
  return EnergyProblem(mesh, materials).solve(f, opts);
}

// ---------------------------------------------------------------------------
// Post-processing

namespace {

bool energy_carrying(const ConductivityModel& m) { return !m.is_structural(); }

}  // namespace

double dirichlet_energy(const PotentialField& field, const MaterialMap& materials) {
  double total = 0.0;
  const Mesh& mesh = *field.mesh;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& law = materials.at(mesh.triangles()[t].label);
    if (!energy_carrying(law)) continue;
    const auto g = field.gradient(t);
    total += mesh.signed_area(t) * law.energy_density(std::hypot(g[0], g[1]));
  }
  return total;
}

std::vector<std::array<double, 2>> current_density(const PotentialField& field,
                                                   const MaterialMap& materials) {
  const Mesh& mesh = *field.mesh;
  std::vector<std::array<double, 2>> out(mesh.num_triangles(), {0.0, 0.0});
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& law = materials.at(mesh.triangles()[t].label);
    if (!energy_carrying(law)) continue;
    const auto g = field.gradient(t);
    const double s = law.sigma(std::hypot(g[0], g[1]));
    out[t] = {-s * g[0], -s * g[1]};
  }
  return out;
}

double gradient_difference_lp(const PotentialField& a, const PotentialField& b, double p) {
  const Mesh& mesh = *a.mesh;
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (a.materials.at(mesh.triangles()[t].label).is_structural()) continue;
    const auto ga = a.gradient(t), gb = b.gradient(t);
    sum += mesh.signed_area(t) * std::pow(std::hypot(ga[0] - gb[0], ga[1] - gb[1]), p);
  }
  return std::pow(sum, 1.0 / p);
}

ContinuityReport boundary_data_continuity_study(const EnergyProblem& problem, const BoundaryDatum& f,
                                                const BoundaryDatum& phi, std::span<const double> eps,
                                                double p, const SolveOptions& opts) {
  ContinuityReport rep;
  const PotentialField base = problem.solve(f, opts);
  std::vector<double> lx, ly;
  for (double e : eps) {
    ContinuityRow row{e, 0.0};
    if (e != 0.0) {
      const PotentialField pert = problem.solve(combine(1.0, f, e, phi), opts, base.u);
      row.difference = gradient_difference_lp(pert, base, p);
      if (row.difference > 0.0) {
        lx.push_back(std::log(e));
        ly.push_back(std::log(row.difference));
      }
    }
    if (!rep.rows.empty() && e < rep.rows.back().eps && !(row.difference < rep.rows.back().difference)) {
      rep.monotone = false;
    }
    rep.rows.push_back(row);
  }
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    rep.slope = sxy / sxx;
  }
  rep.required_slope = (p >= 2.0 ? 1.0 / p : 0.5) - 0.1;
  rep.passed = rep.monotone && lx.size() >= 2 && rep.slope >= rep.required_slope;
  return rep;
}

void write_node_csv(std::ostream& os, const PotentialField& field) {
  os << "node_id,x,y,u\n";
  const auto& nodes = field.mesh->nodes();
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    os << v << ',' << fmt17(nodes[v].x) << ',' << fmt17(nodes[v].y) << ','
       << (std::isnan(field.u[v]) ? std::string("nan") : fmt17(field.u[v])) << '\n';
  }
}

void write_element_csv(std::ostream& os, const PotentialField& field) {
  os << "tri_id,label,Ex,Ey,Jx,Jy,Qdensity\n";
  const Mesh& mesh = *field.mesh;
  const auto j = current_density(field, field.materials);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& law = field.materials.at(mesh.triangles()[t].label);
    std::array<double, 2> e{0.0, 0.0};
    double q = 0.0;
    if (!law.is_structural()) {
      const auto g = field.gradient(t);
      e = {-g[0], -g[1]};
      q = law.energy_density(std::hypot(g[0], g[1]));
    }
    os << t << ',' << mesh.triangles()[t].label << ',' << fmt17(e[0]) << ',' << fmt17(e[1]) << ','
       << fmt17(j[t][0]) << ',' << fmt17(j[t][1]) << ',' << fmt17(q) << '\n';
  }
}

}  // namespace monodtn
