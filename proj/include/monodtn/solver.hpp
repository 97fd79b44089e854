#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monodtn/constitutive.hpp"
#include "monodtn/datum.hpp"
#include "monodtn/mesh.hpp"
#include "monodtn/sparse.hpp"

namespace monodtn {

/// Raised when Newton and the gradient fallback both fail to reach tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double grad_norm)
      : std::runtime_error(what), grad_norm_(grad_norm) {}
  double grad_norm() const { return grad_norm_; }

 private:
  double grad_norm_;
};

struct SolveOptions {
  /// Converged when ||g|| <= tolerance * ||g_abs||, g_abs the elementwise sum of
  /// absolute gradient contributions, after discarding from each component of
  /// g the part below its rounding error estimate.
  double tolerance = 1e-10;
  int max_newton = 50;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  /// Multipliers applied to every law's reg_eps, one continuation stage each,
  /// before the final stage at the nominal reg_eps.
  std::vector<double> reg_schedule = {1e6, 1e5, 1e4, 1e3, 1e2, 1e1};
  /// Tolerance used in the intermediate continuation stages.
  double stage_tolerance = 1e-6;
  double cg_tolerance = 1e-3;  // relative, forcing term for inexact Newton
  int max_cg = 5000;
  /// JSON-lines iteration log.
  std::ostream* log = nullptr;
};

struct SolveStats {
  int newton_iterations = 0;
  int gradient_steps = 0;
  int cg_iterations = 0;
  double grad_norm = 0.0;
  double grad_scale = 0.0;
  /// Norm of the componentwise rounding estimate of g.
  double grad_floor = 0.0;
  std::vector<double> energy_history;  // accepted iterates of the final stage
};

/// Node -> unknown numbering. Boundary nodes are Dirichlet, nodes touching
/// only insulating triangles are masked, and each connected perfectly
/// conducting component collapses to a single unknown.
class DofMap {
 public:
  static constexpr int kDirichlet = -1;
  static constexpr int kMasked = -2;

  DofMap() = default;
  DofMap(const Mesh& mesh, const MaterialMap& materials);

  int num_free() const { return num_free_; }
  int node_dof(int node) const { return node_dof_[node]; }
  std::span<const int> node_dofs() const { return node_dof_; }
  /// Component index per node (-1 outside conductors).
  int pec_component(int node) const { return pec_comp_[node]; }
  int num_pec_components() const { return static_cast<int>(pec_dof_.size()); }
  int pec_dof(int component) const { return pec_dof_[component]; }
  /// Triangles that carry energy (not PEI, not PEC).
  const std::vector<int>& active_triangles() const { return active_; }
  bool is_active(int t) const { return active_mask_[t]; }

 private:
  int num_free_ = 0;
  std::vector<int> node_dof_;
  std::vector<int> pec_comp_;
  std::vector<int> pec_dof_;
  std::vector<int> active_;
  std::vector<char> active_mask_;
};

struct PotentialField {
  const Mesh* mesh = nullptr;
  MaterialMap materials;
  /// Nodal potentials; NaN on masked nodes.
  std::vector<double> u;
  /// Potential of each conducting component, ordered as in DofMap.
  std::vector<double> pec_values;
  SolveStats stats;

  std::array<double, 2> gradient(std::size_t t) const;
};

/// The discrete energy functional for one mesh and material map, reusable
/// across boundary data.
class EnergyProblem {
 public:
  EnergyProblem(const Mesh& mesh, MaterialMap materials);

  const Mesh& mesh() const { return *mesh_; }
  const MaterialMap& materials() const { return materials_; }
  const DofMap& dofs() const { return dofs_; }

  /// Minimizer with trace f. `initial` (nodal, optional) replaces the
  /// harmonic initial guess; its boundary values are overwritten by f.
  PotentialField solve(const BoundaryDatum& f, const SolveOptions& opts = {},
                       std::span<const double> initial = {}) const;

  /// Discrete harmonic extension (sigma = 1 on the active triangles).
  std::vector<double> harmonic_extension(std::span<const double> boundary_values) const;
  /// Linear extension with each region weighted by its conductivity at the
  /// law's reference field E0 (sigma_bar for power laws, Jc/E0 for E-J).
  /// Default initial guess; equals the harmonic extension for a single law.
  std::vector<double> reference_extension(std::span<const double> boundary_values) const;

  /// Energy at the nominal regularization for a nodal vector.
  double energy(std::span<const double> u) const;
  /// Gradient with respect to the free unknowns.
  std::vector<double> gradient(std::span<const double> u) const;
  /// Nodal vector from free unknowns and boundary values.
  std::vector<double> expand(std::span<const double> x, std::span<const double> boundary_values) const;
  /// Free unknowns of a nodal vector (first node of each conductor).
  std::vector<double> restrict(std::span<const double> u) const;

  /// Triangle gradient of a nodal vector (zero for inactive triangles).
  std::array<double, 2> triangle_gradient(std::span<const double> u, std::size_t t) const;

 private:
  struct Geometry {
    double area;
    std::array<double, 3> gx, gy;  // basis gradients
  };
  struct Eval;
  Eval evaluate(std::span<const double> u, const std::vector<ConductivityModel>& laws, bool hessian,
                CsrMatrix* h) const;
  std::vector<ConductivityModel> laws_at(double reg_factor) const;
  std::vector<double> linear_extension(std::span<const double> fb, const std::vector<ConductivityModel>& laws) const;
  void run_stage(std::vector<double>& x, std::span<const double> fb, const std::vector<ConductivityModel>& laws,
                 double tol, const SolveOptions& opts, int stage, double reg_factor, SolveStats& stats,
                 bool final_stage) const;

  const Mesh* mesh_;
  MaterialMap materials_;
  DofMap dofs_;
  std::vector<Geometry> geo_;
  std::vector<int> tri_law_;  // index into law tables, -1 inactive
  std::vector<int> law_labels_;
  CsrMatrix pattern_;
  std::vector<std::array<int, 9>> slots_;
};

PotentialField solve(const Mesh& mesh, const MaterialMap& materials, const BoundaryDatum& f,
                     const SolveOptions& opts = {});

/// Sum over energy-carrying triangles of area * Q(|grad u|).
double dirichlet_energy(const PotentialField& field, const MaterialMap& materials);
inline double dirichlet_energy(const PotentialField& field) {
  return dirichlet_energy(field, field.materials);
}

/// -sigma(|grad u|) grad u per triangle; zero on insulating and perfectly
/// conducting triangles.
std::vector<std::array<double, 2>> current_density(const PotentialField& field,
                                                   const MaterialMap& materials);

/// (sum over active triangles of area |a - b|^p)^(1/p) for triangle gradients.
double gradient_difference_lp(const PotentialField& a, const PotentialField& b, double p);

struct ContinuityRow {
  double eps = 0.0;
  double difference = 0.0;
};

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  double slope = 0.0;        // least squares in log-log over rows with eps > 0
  bool monotone = true;      // differences strictly decrease with eps
  double required_slope = 0.0;
  bool passed = false;
};

/// ||grad u^{f + eps phi} - grad u^f||_{L^p} over the eps list.
ContinuityReport boundary_data_continuity_study(const EnergyProblem& problem, const BoundaryDatum& f,
                                                const BoundaryDatum& phi, std::span<const double> eps,
                                                double p, const SolveOptions& opts = {});

/// node_id,x,y,u
void write_node_csv(std::ostream& os, const PotentialField& field);
/// tri_id,label,Ex,Ey,Jx,Jy,Qdensity
void write_element_csv(std::ostream& os, const PotentialField& field);

/// %.17g
std::string fmt17(double v);

}  // namespace monodtn
