#include "monodtn/dtn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "monodtn/parallel.hpp"

namespace monodtn {

namespace {

std::vector<double> lift_of(const EnergyProblem& problem, std::span<const double> phi, Lift lift) {
  if (lift == Lift::Harmonic) return problem.harmonic_extension(phi);
  const std::vector<double> zero(problem.dofs().num_free(), 0.0);
  return problem.expand(zero, phi);
}

double pairing_with_lift(const EnergyProblem& problem, const PotentialField& uf, std::span<const double> lifted) {
  const Mesh& mesh = problem.mesh();
  double total = 0.0;
  for (int t : problem.dofs().active_triangles()) {
    const auto& law = problem.materials().at(mesh.triangles()[t].label);
    const auto g = problem.triangle_gradient(uf.u, t);
    const auto h = problem.triangle_gradient(lifted, t);
    total += mesh.signed_area(t) * law.sigma(std::hypot(g[0], g[1])) * (g[0] * h[0] + g[1] * h[1]);
  }
  return total;
}

}  // namespace

double dtn_pairing(const EnergyProblem& problem, const PotentialField& uf, std::span<const double> phi, Lift lift) {
  return pairing_with_lift(problem, uf, lift_of(problem, phi, lift));
}

double dtn_pairing(const EnergyProblem& problem, const BoundaryDatum& f, const BoundaryDatum& phi,
                   const SolveOptions& opts, Lift lift) {
  return dtn_pairing(problem, problem.solve(f, opts), phi.values, lift);
}

namespace {

struct NodeSolves {
  std::vector<PotentialField> fields;  // one per quadrature node, ascending alpha
  PotentialField full;                 // alpha = 1
};

NodeSolves solve_nodes(const EnergyProblem& problem, const BoundaryDatum& f, const QuadratureRule& rule,
                       const DtnOptions& opts) {
  NodeSolves out;
  const int n = static_cast<int>(rule.nodes.size());
  out.fields.resize(n);
  if (opts.warm_start) {
    std::vector<double> guess;
    double prev_alpha = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = rule.nodes[i];
      if (!guess.empty()) {
        for (double& v : guess) v *= a / prev_alpha;
      }
      out.fields[i] = problem.solve(f.scaled(a), opts.solve, guess);
      guess = out.fields[i].u;
      prev_alpha = a;
    }
    for (double& v : guess) v *= 1.0 / prev_alpha;
    out.full = problem.solve(f, opts.solve, guess);
  } else {
    parallel_for(n + 1, opts.workers, [&](int i) {
      if (i == n) out.full = problem.solve(f, opts.solve);
      else out.fields[i] = problem.solve(f.scaled(rule.nodes[i]), opts.solve);
    });
  }
  return out;
}

}  // namespace

PowerReport average_dtn_power(const EnergyProblem& problem, const BoundaryDatum& f, const DtnOptions& opts) {
  if (opts.quad_order < 2) throw std::invalid_argument("quadrature order must be at least 2");
  const QuadratureRule rule = alpha_rule(opts.quad_order, opts.map);
  const auto lifted = lift_of(problem, f.values, Lift::Harmonic);
  const NodeSolves solves = solve_nodes(problem, f, rule, opts);

  PowerReport rep;
  rep.datum = f.descriptor;
  rep.quad_order = opts.quad_order;
  rep.map = opts.map;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    PowerSample s;
    s.alpha = rule.nodes[i];
    s.weight = rule.weights[i];
    s.pairing = pairing_with_lift(problem, solves.fields[i], lifted);
    s.newton_iterations = solves.fields[i].stats.newton_iterations;
    rep.avg_power += s.weight * s.pairing;
    rep.samples.push_back(s);
  }
  rep.power = pairing_with_lift(problem, solves.full, lifted);
  rep.energy = problem.energy(solves.full.u);
  rep.transfer_residual = std::abs(rep.avg_power - rep.energy) / std::max(rep.energy, opts.energy_floor);
  return rep;
}

double average_cross_pairing(const EnergyProblem& problem, const BoundaryDatum& f1, const BoundaryDatum& f2,
                             const DtnOptions& opts) {
  const QuadratureRule rule = alpha_rule(opts.quad_order, opts.map);
  const BoundaryDatum diff = combine(1.0, f1, -1.0, f2);
  const auto lifted = lift_of(problem, diff.values, Lift::Harmonic);
  const NodeSolves s1 = solve_nodes(problem, f1, rule, opts);
  const NodeSolves s2 = solve_nodes(problem, f2, rule, opts);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i] *
             (pairing_with_lift(problem, s1.fields[i], lifted) - pairing_with_lift(problem, s2.fields[i], lifted));
  }
  return total;
}

GateauxReport gateaux_check(const EnergyProblem& problem, const BoundaryDatum& f, const BoundaryDatum& phi,
                            std::span<const double> eps, const SolveOptions& opts) {
  GateauxReport rep;
  const PotentialField base = problem.solve(f, opts);
  const double e0 = problem.energy(base.u);
  rep.pairing = dtn_pairing(problem, base, phi.values);
  rep.scale = std::abs(rep.pairing);
  if (rep.scale == 0.0) rep.scale = std::abs(dtn_pairing(problem, base, f.values));
  for (double e : eps) {
    GateauxRow row{e, 0.0, 0.0};
    if (e != 0.0) {
      const PotentialField pert = problem.solve(combine(1.0, f, e, phi), opts, base.u);
      row.quotient = (problem.energy(pert.u) - e0) / e;
      row.residual = std::abs(row.quotient - rep.pairing);
    } else {
      row.quotient = rep.pairing;
    }
    if (!rep.rows.empty() && !(row.residual < rep.rows.back().residual) && row.residual != 0.0) rep.monotone = false;
    rep.rows.push_back(row);
  }
  if (!rep.rows.empty()) rep.final_relative = rep.scale > 0.0 ? rep.rows.back().residual / rep.scale : 0.0;
  return rep;
}

nlohmann::json to_json(const PowerReport& r) {
  nlohmann::json j;
  j["datum"] = r.datum;
  j["power"] = r.power;
  j["avg_power"] = r.avg_power;
  j["energy"] = r.energy;
  j["quad_order"] = r.quad_order;
  j["quad_map"] = to_string(r.map);
  j["transfer_residual"] = r.transfer_residual;
  auto& samples = j["samples"] = nlohmann::json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"alpha", s.alpha}, {"weight", s.weight}, {"pairing", s.pairing}});
  }
  return j;
}

void write_power_csv_header(std::ostream& os) {
  os << "datum_id,material_id,power,avg_power,energy,transfer_residual\n";
}

void write_power_csv_row(std::ostream& os, const std::string& datum_id, const std::string& material_id,
                         const PowerReport& r) {
  os << datum_id << ',' << material_id << ',' << fmt17(r.power) << ',' << fmt17(r.avg_power) << ','
     << fmt17(r.energy) << ',' << fmt17(r.transfer_residual) << '\n';
}

}  // namespace monodtn
