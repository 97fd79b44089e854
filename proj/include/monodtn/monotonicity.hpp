#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monodtn/dtn.hpp"

namespace monodtn {

struct LeqWitness {
  int region = 0;
  double e = 0.0;
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
};

/// sigma_lo <= sigma_hi on every region and grid point. PEI sits below and
/// PEC above every law.
struct LeqCertificate {
  bool holds = true;
  std::optional<LeqWitness> witness;  // first failing (region, E)
  std::string message;
};

/// 10^-12 ... 10^12 V/m, ten points per decade.
std::vector<double> default_field_grid();

LeqCertificate pointwise_leq(const MaterialMap& lo, const MaterialMap& hi,
                             std::span<const double> e_grid);
inline LeqCertificate pointwise_leq(const MaterialMap& lo, const MaterialMap& hi) {
  return pointwise_leq(lo, hi, default_field_grid());
}

enum class Regime { SinglePhase, TwoPhase, Insulating, Conducting, Mixed };
std::string to_string(Regime r);
Regime classify(const MaterialMap& materials);

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OrderedPair {
  std::string name;
  MaterialMap lo, hi;
  LeqCertificate certificate;
  /// The two maps fall in different structural regimes. Such pairs are run,
  /// but the ordering argument only covers same-regime pairs.
  bool cross_regime = false;
};

OrderedPair make_pair(std::string name, MaterialMap lo, MaterialMap hi);

struct MonotonicityRow {
  std::string datum;
  double power_lo = 0.0, power_hi = 0.0, delta = 0.0;  // averaged powers, delta = hi - lo
  double energy_lo = 0.0, energy_hi = 0.0, energy_delta = 0.0;
  double residual_lo = 0.0, residual_hi = 0.0;
  double tolerance = 0.0;  // attributed tolerance for delta
  bool violation = false;
  bool energy_violation = false;
};

struct MonotonicityReport {
  std::string pair;
  bool cross_regime = false;
  bool averaged = false;  // power columns filled
  std::vector<MonotonicityRow> rows;
  int violations = 0;
  int energy_violations = 0;
  int total_violations() const { return violations + energy_violations; }
};

struct CompareOptions {
  DtnOptions dtn;
  int workers = 1;
  double energy_floor = 1e-300;
};

/// E_lo(u_lo^f) <= E_hi(u_hi^f) + 1e-8 max(E_hi, floor) for every datum.
MonotonicityReport energy_compare(const Mesh& mesh, const OrderedPair& pair,
                                  std::span<const BoundaryDatum> data, const CompareOptions& opts = {});

/// Averaged powers and energies. A row is a violation only when
/// delta < -max(1e-8 scale, 3 max(residual) scale).
MonotonicityReport avg_dtn_compare(const Mesh& mesh, const OrderedPair& pair,
                                   std::span<const BoundaryDatum> data, const CompareOptions& opts = {});

struct LadderReport {
  std::vector<std::string> rungs;
  std::vector<std::vector<double>> powers;  // [rung][datum]
  std::vector<MonotonicityReport> pairs;    // every i < j
  bool nondecreasing = true;                // along the chain, per datum
  int violations() const;
};

/// PEI <= base/10 <= base <= 10 base <= PEC on the inclusion labels.
LadderReport ladder_suite(const Mesh& mesh, const MaterialMap& base, std::span<const int> inclusion,
                          std::span<const BoundaryDatum> data, const CompareOptions& opts = {});

/// datum,power_lo,power_hi,delta,energy_lo,energy_hi,energy_delta,residual_lo,residual_hi,tolerance,violation
void write_report_csv(std::ostream& os, const MonotonicityReport& report);
/// f,E0,E1,difference with E0 the upper (healthy) and E1 the lower energy.
void write_table_csv(std::ostream& os, const MonotonicityReport& report);

}  // namespace monodtn
