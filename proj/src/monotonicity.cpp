#include "monodtn/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "monodtn/parallel.hpp"

namespace monodtn {

std::vector<double> default_field_grid() {
  std::vector<double> g;
  for (int k = -120; k <= 120; ++k) g.push_back(std::pow(10.0, k / 10.0));
  return g;
}

namespace {

// -1 for PEI, +1 for PEC, 0 for a pointwise law.
int rank(const ConductivityModel& m) {
  if (m.kind() == LawKind::PEI) return -1;
  if (m.kind() == LawKind::PEC) return 1;
  return 0;
}

}  // namespace

LeqCertificate pointwise_leq(const MaterialMap& lo, const MaterialMap& hi, std::span<const double> e_grid) {
  LeqCertificate cert;
  auto fail = [&](std::string msg, std::optional<LeqWitness> w = std::nullopt) {
    cert.holds = false;
    cert.message = std::move(msg);
    cert.witness = w;
    return cert;
  };
  for (const auto& [label, _] : lo.regions()) {
    if (!hi.contains(label)) return fail("region " + std::to_string(label) + " missing from upper map");
  }
  for (const auto& [label, _] : hi.regions()) {
    if (!lo.contains(label)) return fail("region " + std::to_string(label) + " missing from lower map");
  }
  for (const auto& [label, a] : lo.regions()) {
    const auto& b = hi.at(label);
    const int ra = rank(a), rb = rank(b);
    if (ra == -1 || rb == 1) continue;
    if (ra == 1 || rb == -1) {
      return fail("region " + std::to_string(label) + ": " + to_string(a.kind()) + " is not below " +
                  to_string(b.kind()));
    }
    for (double e : e_grid) {
      const double sa = a.sigma(e), sb = b.sigma(e);
      if (sa > sb * (1.0 + 1e-12)) {
        return fail("region " + std::to_string(label) + ": sigma_lo > sigma_hi at E = " + fmt17(e),
                    LeqWitness{label, e, sa, sb});
      }
    }
  }
  return cert;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::SinglePhase: return "single-phase";
    case Regime::TwoPhase: return "two-phase";
    case Regime::Insulating: return "insulating";
    case Regime::Conducting: return "conducting";
    case Regime::Mixed: return "mixed";
  }
  return "?";
}

Regime classify(const MaterialMap& materials) {
  bool pei = false, pec = false;
  for (const auto& [_, m] : materials.regions()) {
    pei = pei || m.kind() == LawKind::PEI;
    pec = pec || m.kind() == LawKind::PEC;
  }
  if (pei && pec) return Regime::Mixed;
  if (pei) return Regime::Insulating;
  if (pec) return Regime::Conducting;
  const auto outer = materials.outer_exponent();
  const auto inner = materials.inner_exponent();
  if (outer && inner && *outer != *inner) return Regime::TwoPhase;
  for (const auto& [label, m] : materials.regions()) {
    if (m.growth_exponent() != outer) return Regime::TwoPhase;
  }
  return Regime::SinglePhase;
}

OrderedPair make_pair(std::string name, MaterialMap lo, MaterialMap hi) {
  OrderedPair p;
  p.name = std::move(name);
  p.certificate = pointwise_leq(lo, hi);
  p.cross_regime = classify(lo) != classify(hi);
  p.lo = std::move(lo);
  p.hi = std::move(hi);
  return p;
}

namespace {

MonotonicityReport compare(const Mesh& mesh, const OrderedPair& pair, std::span<const BoundaryDatum> data,
                           const CompareOptions& opts, bool averaged) {
  if (!pair.certificate.holds) {
    throw CertificateError("order certificate failed for " + pair.name + ": " + pair.certificate.message);
  }
  const EnergyProblem lo(mesh, pair.lo), hi(mesh, pair.hi);
  const int nd = static_cast<int>(data.size());
  std::vector<PowerReport> out(2 * nd);
  parallel_for(2 * nd, opts.workers, [&](int k) {
    const EnergyProblem& prob = k % 2 == 0 ? lo : hi;
    const BoundaryDatum& f = data[k / 2];
    if (averaged) {
      out[k] = average_dtn_power(prob, f, opts.dtn);
    } else {
      out[k].datum = f.descriptor;
      out[k].energy = prob.energy(prob.solve(f, opts.dtn.solve).u);
    }
  });

  MonotonicityReport rep;
  rep.pair = pair.name;
  rep.cross_regime = pair.cross_regime;
  rep.averaged = averaged;
  for (int i = 0; i < nd; ++i) {
    const PowerReport& a = out[2 * i];
    const PowerReport& b = out[2 * i + 1];
    MonotonicityRow row;
    row.datum = data[i].descriptor;
    row.energy_lo = a.energy;
    row.energy_hi = b.energy;
    row.energy_delta = b.energy - a.energy;
    row.energy_violation = a.energy > b.energy + 1e-8 * std::max(b.energy, opts.energy_floor);
    if (averaged) {
      row.power_lo = a.avg_power;
      row.power_hi = b.avg_power;
      row.delta = b.avg_power - a.avg_power;
      row.residual_lo = a.transfer_residual;
      row.residual_hi = b.transfer_residual;
      const double scale = std::max({std::abs(a.avg_power), std::abs(b.avg_power), opts.energy_floor});
      row.tolerance = std::max(1e-8, 3.0 * std::max(a.transfer_residual, b.transfer_residual)) * scale;
      row.violation = row.delta < -row.tolerance;
    }
    rep.violations += row.violation;
    rep.energy_violations += row.energy_violation;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace

MonotonicityReport energy_compare(const Mesh& mesh, const OrderedPair& pair, std::span<const BoundaryDatum> data,
                                  const CompareOptions& opts) {
  return compare(mesh, pair, data, opts, false);
}

MonotonicityReport avg_dtn_compare(const Mesh& mesh, const OrderedPair& pair, std::span<const BoundaryDatum> data,
                                   const CompareOptions& opts) {
  return compare(mesh, pair, data, opts, true);
}

int LadderReport::violations() const {
  int v = nondecreasing ? 0 : 1;
  for (const auto& p : pairs) v += p.total_violations();
  return v;
}

LadderReport ladder_suite(const Mesh& mesh, const MaterialMap& base, std::span<const int> inclusion,
                          std::span<const BoundaryDatum> data, const CompareOptions& opts) {
  if (inclusion.empty()) throw std::invalid_argument("ladder needs at least one inclusion label");
  std::vector<MaterialMap> maps(5, base);
  LadderReport rep;
  rep.rungs = {"PEI", "sigma/10", "sigma", "10sigma", "PEC"};
  for (int label : inclusion) {
    if (label == 0) throw std::invalid_argument("ladder inclusion cannot be the background");
    const auto& law = base.at(label);
    if (law.is_structural()) throw std::invalid_argument("ladder base law must be finite");
    maps[0].set(label, ConductivityModel::pei());
    maps[1].set(label, law.scaled(0.1));
    maps[3].set(label, law.scaled(10.0));
    maps[4].set(label, ConductivityModel::pec());
  }

  // Solve each rung once; pair reports are assembled from the rung powers.
  const int nd = static_cast<int>(data.size());
  std::vector<PowerReport> out(5 * nd);
  std::vector<EnergyProblem> problems;
  for (const auto& m : maps) problems.emplace_back(mesh, m);
  parallel_for(5 * nd, opts.workers,
               [&](int k) { out[k] = average_dtn_power(problems[k / nd], data[k % nd], opts.dtn); });

  rep.powers.assign(5, std::vector<double>(nd));
  for (int r = 0; r < 5; ++r) {
    for (int i = 0; i < nd; ++i) rep.powers[r][i] = out[r * nd + i].avg_power;
  }
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      const OrderedPair pair = make_pair(rep.rungs[i] + " <= " + rep.rungs[j], maps[i], maps[j]);
      if (!pair.certificate.holds) {
        throw CertificateError("ladder link " + pair.name + " not certified: " + pair.certificate.message);
      }
      MonotonicityReport pr;
      pr.pair = pair.name;
      pr.cross_regime = pair.cross_regime;
      pr.averaged = true;
      for (int d = 0; d < nd; ++d) {
        const PowerReport& a = out[i * nd + d];
        const PowerReport& b = out[j * nd + d];
        MonotonicityRow row;
        row.datum = data[d].descriptor;
        row.power_lo = a.avg_power;
        row.power_hi = b.avg_power;
        row.delta = b.avg_power - a.avg_power;
        row.energy_lo = a.energy;
        row.energy_hi = b.energy;
        row.energy_delta = b.energy - a.energy;
        row.residual_lo = a.transfer_residual;
        row.residual_hi = b.transfer_residual;
        const double scale = std::max({std::abs(a.avg_power), std::abs(b.avg_power), opts.energy_floor});
        row.tolerance = std::max(1e-8, 3.0 * std::max(a.transfer_residual, b.transfer_residual)) * scale;
        row.violation = row.delta < -row.tolerance;
        row.energy_violation = a.energy > b.energy + 1e-8 * std::max(b.energy, opts.energy_floor);
        pr.violations += row.violation;
        pr.energy_violations += row.energy_violation;
        pr.rows.push_back(std::move(row));
      }
      if (j == i + 1 && pr.violations > 0) rep.nondecreasing = false;
      rep.pairs.push_back(std::move(pr));
    }
  }
  return rep;
}

void write_report_csv(std::ostream& os, const MonotonicityReport& r) {
  os << "datum,power_lo,power_hi,delta,energy_lo,energy_hi,energy_delta,residual_lo,residual_hi,tolerance,violation\n";
  for (const auto& row : r.rows) {
    os << '"' << row.datum << "\"," << fmt17(row.power_lo) << ',' << fmt17(row.power_hi) << ','
       << fmt17(row.delta) << ',' << fmt17(row.energy_lo) << ',' << fmt17(row.energy_hi) << ','
       << fmt17(row.energy_delta) << ',' << fmt17(row.residual_lo) << ',' << fmt17(row.residual_hi) << ','
       << fmt17(row.tolerance) << ',' << ((row.violation || row.energy_violation) ? 1 : 0) << '\n';
  }
}

void write_table_csv(std::ostream& os, const MonotonicityReport& r) {
  os << "f,E0,E1,difference\n";
  for (const auto& row : r.rows) {
    os << '"' << row.datum << "\"," << fmt17(row.energy_hi) << ',' << fmt17(row.energy_lo) << ','
       << fmt17(row.energy_delta) << '\n';
  }
}

}  // namespace monodtn
