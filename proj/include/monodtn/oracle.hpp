#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "monodtn/constitutive.hpp"
#include "monodtn/datum.hpp"
#include "monodtn/mesh.hpp"

namespace monodtn {

/// Radial p-Laplace solution on R1 < r < R2 for sigma = sigma_bar (E/E0)^(p-2):
/// u = A r^beta + B with beta = (p-2)/(p-1), or A ln r + B when p = 2.
struct RadialSolution {
  double p = 2.0, sigma_bar = 1.0, e0 = 1.0;
  double r1 = 1.0, r2 = 2.0, u1 = 0.0, u2 = 1.0;
  double a = 0.0, b = 0.0, beta = 0.0;

  double u(double r) const;
  double du(double r) const;
  /// r sigma(|u'|) |u'|, constant in r.
  double flux_constant(double r) const;
  /// Closed-form energy.
  double energy() const;
  /// Composite Gauss-Legendre integral of 2 pi r Q(|u'|), independent of energy().
  double energy_quadrature(int panels = 400) const;
  /// Ohmic power = p * energy for the homogeneous law.
  double power() const { return p * energy(); }
};

RadialSolution annulus_radial_solution(double p, double sigma_bar, double e0, double r1, double r2, double u1,
                                       double u2);

/// Series conduction through a unit-length strip: layer B on a fraction `a`,
/// layer A on the rest, voltage V across. Quantities per unit cross-section.
struct StripSolution {
  double e_b = 0.0, e_a = 0.0, j = 0.0;
  double energy = 0.0;  // a Q_B(E_B) + (1 - a) Q_A(E_A)
  double power = 0.0;   // J V
};

StripSolution two_layer_strip(const ConductivityModel& layer_b, const ConductivityModel& layer_a, double a,
                              double v);

/// Field magnitude with flux(E) = j, by bisection. Throws if no bracket.
double invert_flux(const ConductivityModel& law, double j);

/// Energy of a nodal vector computed triangle by triangle, sharing no code
/// with the solver. Insulating triangles carry no energy; conductors are rejected.
double oracle_energy(const Mesh& mesh, const MaterialMap& materials, std::span<const double> u);

struct BruteForceResult {
  std::vector<double> u;  // nodal, NaN on masked nodes
  double energy = 0.0;
  int sweeps = 0;
  int free_nodes = 0;
};

/// Derivative-free minimizer: Brent line minimization along each nodal
/// coordinate, repeated sweeps, several random restarts; best result kept.
BruteForceResult brute_force_min(const Mesh& mesh, const MaterialMap& materials, const BoundaryDatum& f,
                                 std::uint64_t seed = 1, int restarts = 3, int max_sweeps = 20000);

}  // namespace monodtn
