#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace monodtn {

enum class LawKind { PowerLaw, Linear, EJPowerLaw, PEC, PEI, Tabulated };

std::string to_string(LawKind kind);

/// Scalar constitutive law E -> sigma(E) for isotropic conduction, J = sigma(|E|) E.
///
/// Power-type laws (PowerLaw, EJPowerLaw) are regularized below `reg_eps`:
/// the flux is continued linearly, flux(E) = sigma(reg_eps) E, and the energy
/// density is the integral of that flux. This keeps Q convex, C^1 and zero at
/// E = 0 while bounding sigma for growth exponents below 2. Above reg_eps the
/// flux is the exact law and Q differs from the unregularized antiderivative
/// only by a constant of order sigma_bar E0^2 (reg_eps/E0)^p.
///
/// PEC and PEI are structural: the solver handles them through the degree of
/// freedom map and they never evaluate pointwise.
class ConductivityModel {
 public:
  static ConductivityModel linear(double sigma);
  /// sigma(E) = sigma_bar (E/E0)^(p-2).
  static ConductivityModel power_law(double sigma_bar, double e0, double p,
                                     std::optional<double> reg_eps = std::nullopt);
  /// sigma(E) = (Jc/E0) (E/E0)^((1-n)/n), growth exponent (n+1)/n.
  static ConductivityModel ej_power_law(double jc, double e0, double n,
                                        std::optional<double> reg_eps = std::nullopt);
  static ConductivityModel pec();
  static ConductivityModel pei();
  /// Piecewise-linear flux through samples (E_i, J_i), E strictly increasing,
  /// starting at (0, 0). Continued linearly past the last sample. The samples
  /// need not be monotone; the solver rejects non-monotone tables.
  static ConductivityModel tabulated(std::vector<std::pair<double, double>> samples);

  LawKind kind() const { return kind_; }
  bool is_structural() const { return kind_ == LawKind::PEC || kind_ == LawKind::PEI; }

  /// Growth exponent (2 for linear, (n+1)/n for E-J); nullopt for PEC/PEI/Tabulated.
  std::optional<double> growth_exponent() const;
  double reg_eps() const { return reg_eps_; }
  double e0() const { return e0_; }
  double sigma_bar() const { return sigma_bar_; }
  double jc() const { return jc_; }
  double n_value() const { return n_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

  /// Same law with a different regularization floor (no-op for non-power laws).
  ConductivityModel with_reg_eps(double eps) const;
  /// Law with conductivity multiplied by `factor` (flux and energy scale alike).
  ConductivityModel scaled(double factor) const;

  /// Conductivity at field magnitude E >= 0. Throws std::logic_error for PEC/PEI.
  double sigma(double e) const;
  /// sigma(E) E.
  double flux(double e) const;
  /// d(sigma(E) E)/dE.
  double dflux(double e) const;
  /// Q(E) = integral_0^E sigma(s) s ds.
  double energy_density(double e) const;

  /// True when E -> flux(E) is strictly increasing (always for the closed
  /// forms; checked on the samples for tables).
  bool has_monotone_flux() const;

  bool operator==(const ConductivityModel&) const = default;

 private:
  ConductivityModel() = default;
  void require_pointwise() const;
  double raw_sigma(double e) const;
  double raw_energy(double e) const;
  double table_flux(double e, double* slope) const;

  LawKind kind_ = LawKind::Linear;
  double sigma_bar_ = 0.0;  // PowerLaw sigma_bar, Linear sigma, E-J Jc/E0
  double e0_ = 1.0;
  double p_ = 2.0;
  double jc_ = 0.0;
  double n_ = 0.0;
  double reg_eps_ = 0.0;
  std::vector<std::pair<double, double>> samples_;
  std::vector<double> table_energy_;  // cumulative integral at each sample
};

/// Region label -> law. Region 0 is the background and always carries a
/// finite law.
class MaterialMap {
 public:
  MaterialMap() = default;
  MaterialMap(std::map<int, ConductivityModel> regions) : regions_(std::move(regions)) {}

  const std::map<int, ConductivityModel>& regions() const { return regions_; }
  const ConductivityModel& at(int label) const;
  bool contains(int label) const { return regions_.contains(label); }
  void set(int label, ConductivityModel model);
  MaterialMap with(int label, ConductivityModel model) const;

  /// Throws std::invalid_argument if a label of `mesh_labels` has no model,
  /// region 0 is structural, or a table is non-monotone.
  void check(std::span<const int> mesh_labels) const;

  /// Growth exponent of region 0 (the outer exponent p).
  std::optional<double> outer_exponent() const;
  /// Growth exponent shared by the finite inclusion laws, if any.
  std::optional<double> inner_exponent() const;

  bool operator==(const MaterialMap&) const = default;

 private:
  std::map<int, ConductivityModel> regions_;
};

/// Material config: {"regions":{"0":{"type":"linear","sigma":5.55e7}, ...}}.
MaterialMap materials_from_json(const nlohmann::json& doc);
nlohmann::json materials_to_json(const MaterialMap& materials);
ConductivityModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const ConductivityModel& model);

// ---------------------------------------------------------------------------
// Structural assumption checks

struct BoundCheck {
  bool passed = true;
  std::optional<double> witness_e;  // first grid value violating a bound
  std::string message;
};

/// Two-sided growth bound on a grid of field magnitudes:
///   p >= 2: lo (E/E0)^(p-2) <= sigma(E) <= hi [1 + (E/E0)^(p-2)]
///   p <  2: lo (E/E0)^(p-2) <= sigma(E) <= hi (E/E0)^(p-2)
/// A relative slack of 1e-12 absorbs rounding at saturated bounds.
BoundCheck check_growth_bounds(const ConductivityModel& model, double p, double sigma_lo,
                               double sigma_hi, double e0, std::span<const double> e_grid);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct MonotonicityCheck {
  bool passed = true;
  /// min over samples of lhs / (rhs without kappa); the empirical kappa.
  double best_kappa = 0.0;
  std::optional<std::pair<Vec2, Vec2>> witness;
};

/// Strong monotonicity of the vector flux E -> sigma(|E|) E:
///   p >= 2: (J2 - J1).(E2 - E1) >= kappa |E2 - E1|^p
///   p <  2: (J2 - J1).(E2 - E1) >= kappa (1 + |E2|^2 + |E1|^2)^((p-2)/2) |E2 - E1|^2
MonotonicityCheck check_strong_monotonicity(const ConductivityModel& model, double p, double kappa,
                                            std::span<const std::pair<Vec2, Vec2>> pairs);

}  // namespace monodtn
