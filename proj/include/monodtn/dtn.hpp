#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "monodtn/quadrature.hpp"
#include "monodtn/solver.hpp"

namespace monodtn {

/// Interior extension of a boundary test function.
enum class Lift { Harmonic, ZeroExtension };

/// <Lambda(f), phi> evaluated volumetrically as
/// sum_T area sigma(|grad u|) grad u . grad Phi, Phi the lift of phi.
double dtn_pairing(const EnergyProblem& problem, const PotentialField& uf, std::span<const double> phi,
                   Lift lift = Lift::Harmonic);
double dtn_pairing(const EnergyProblem& problem, const BoundaryDatum& f, const BoundaryDatum& phi,
                   const SolveOptions& opts = {}, Lift lift = Lift::Harmonic);

struct DtnOptions {
  SolveOptions solve;
  int quad_order = 16;
  QuadMap map = QuadMap::Affine;
  /// Sequential node solves seeded by the scaled previous solution.
  bool warm_start = true;
  int workers = 1;  // used only without warm starts
  double energy_floor = 1e-300;
};

struct PowerSample {
  double alpha = 0.0;
  double weight = 0.0;
  double pairing = 0.0;  // <Lambda(alpha f), f>
  int newton_iterations = 0;
};

struct PowerReport {
  std::string datum;
  double power = 0.0;      // <Lambda(f), f>
  double avg_power = 0.0;  // <bar Lambda(f), f>
  double energy = 0.0;     // E(u^f)
  int quad_order = 0;
  QuadMap map = QuadMap::Affine;
  double transfer_residual = 0.0;
  std::vector<PowerSample> samples;
};

PowerReport average_dtn_power(const EnergyProblem& problem, const BoundaryDatum& f, const DtnOptions& opts = {});

/// <bar Lambda(f1) - bar Lambda(f2), f1 - f2> by the same quadrature.
double average_cross_pairing(const EnergyProblem& problem, const BoundaryDatum& f1, const BoundaryDatum& f2,
                             const DtnOptions& opts = {});

struct GateauxRow {
  double eps = 0.0;
  double quotient = 0.0;  // (E(u^{f + eps phi}) - E(u^f)) / eps
  double residual = 0.0;  // |quotient - <Lambda(f), phi>|
};

struct GateauxReport {
  double pairing = 0.0;
  double scale = 0.0;  // |<Lambda(f), phi>|, or the f-power when that vanishes
  std::vector<GateauxRow> rows;
  bool monotone = true;
  double final_relative = 0.0;  // last residual / scale
};

GateauxReport gateaux_check(const EnergyProblem& problem, const BoundaryDatum& f, const BoundaryDatum& phi,
                            std::span<const double> eps, const SolveOptions& opts = {});

nlohmann::json to_json(const PowerReport& report);
/// datum_id,material_id,power,avg_power,energy,transfer_residual
void write_power_csv_header(std::ostream& os);
void write_power_csv_row(std::ostream& os, const std::string& datum_id, const std::string& material_id,
                         const PowerReport& report);

}  // namespace monodtn
