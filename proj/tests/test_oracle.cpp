#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "monodtn/oracle.hpp"
#include "monodtn/solver.hpp"

using namespace monodtn;

TEST_CASE("radial p=2 solution is ln r with energy pi") {
  const auto s = annulus_radial_solution(2.0, 1.0, 1.0, 1.0, std::exp(1.0), 0.0, 1.0);
  for (double r : {1.0, 1.5, 2.0, 2.5, std::exp(1.0)}) CHECK(s.u(r) == doctest::Approx(std::log(r)).epsilon(1e-14));
  CHECK(s.energy() == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(s.energy_quadrature() == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(s.power() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("radial solutions hit the boundary values and conserve flux") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    CAPTURE(p);
    const auto s = annulus_radial_solution(p, 2.5, 0.7, 0.5, 1.7, -0.3, 1.1);
    CHECK(s.u(0.5) == doctest::Approx(-0.3).epsilon(1e-13));
    CHECK(s.u(1.7) == doctest::Approx(1.1).epsilon(1e-13));
    const double c0 = s.flux_constant(0.5);
    for (double r = 0.5; r <= 1.7; r += 0.05) CHECK(std::abs(s.flux_constant(r) - c0) <= 1e-12 * std::abs(c0));
    // Closed form and quadrature are independent routes.
    CHECK(s.energy_quadrature() == doctest::Approx(s.energy()).epsilon(1e-10));
    // |u'| ~ r^(-1/(p-1)).
    CHECK(std::abs(s.du(1.0)) / std::abs(s.du(1.5)) == doctest::Approx(std::pow(1.5, 1.0 / (p - 1.0))).epsilon(1e-12));
  }
}

TEST_CASE("equal boundary values give a constant solution") {
  const auto s = annulus_radial_solution(4.0, 1.0, 1.0, 1.0, 2.0, 0.25, 0.25);
  CHECK(s.energy() == 0.0);
  CHECK(s.u(1.3) == doctest::Approx(0.25));
}

TEST_CASE("radial oracle rejects bad input") {
  CHECK_THROWS_AS(annulus_radial_solution(1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(annulus_radial_solution(2.0, 1.0, 1.0, 2.0, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("two-layer strip") {
  SUBCASE("identical laws give a uniform field") {
    const auto law = ConductivityModel::power_law(1.0, 1.0, 3.0);
    const auto s = two_layer_strip(law, law, 0.3, 2.0);
    CHECK(s.e_b == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.e_a == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("series resistors") {
    const auto s = two_layer_strip(ConductivityModel::linear(1.0), ConductivityModel::linear(2.0), 0.5, 1.0);
    CHECK(s.j == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(s.e_b == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(s.e_a == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.power == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("linear matrix against an E-J layer") {
    const auto b = ConductivityModel::linear(5.55e7);
    const auto a = ConductivityModel::ej_power_law(8e9, 1e-4, 27.0);
    const auto s = two_layer_strip(b, a, 0.6, 1e-3);
    CHECK(std::abs(b.flux(s.e_b) - a.flux(s.e_a)) <= 1e-12 * s.j);
    CHECK(0.6 * s.e_b + 0.4 * s.e_a == doctest::Approx(1e-3).epsilon(1e-12));
    const double q = 0.6 * b.energy_density(s.e_b) + 0.4 * a.energy_density(s.e_a);
    CHECK(s.energy == doctest::Approx(q).epsilon(1e-12));
  }
}

TEST_CASE("flux inversion round trip") {
  for (const auto& law : {ConductivityModel::power_law(2.0, 0.5, 1.3), ConductivityModel::power_law(1.0, 1.0, 4.0),
                          ConductivityModel::ej_power_law(8e9, 1e-4, 27.0)}) {
    for (double e : {1e-6, 1e-3, 0.2, 7.0}) {
      CHECK(invert_flux(law, law.flux(e)) == doctest::Approx(e).epsilon(1e-10));
    }
  }
}

TEST_CASE("oracle energy agrees with the solver's functional") {
  const Mesh m = build_disk_mesh(1.0, 0.25, {DiskShape{{0.1, 0.0}, 0.4, 1}});
  MaterialMap mats;
  mats.set(0, ConductivityModel::power_law(1.0, 1.0, 3.0));
  mats.set(1, ConductivityModel::power_law(2.0, 1.0, 1.5));
  const EnergyProblem prob(m, mats);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  std::vector<double> u(m.num_nodes());
  for (double& v : u) v = u01(rng);
  CHECK(oracle_energy(m, mats, u) == doctest::Approx(prob.energy(u)).epsilon(1e-13));
  mats.set(1, ConductivityModel::pec());
  CHECK_THROWS(oracle_energy(m, mats, u));
}

TEST_CASE("brute force matches a direct linear solve on two triangles") {
  const Mesh sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.4, 0.55}},
                {{{0, 1, 4}, 0}, {{1, 2, 4}, 0}, {{2, 3, 4}, 0}, {{3, 0, 4}, 0}});
  MaterialMap mats;
  mats.set(0, ConductivityModel::linear(1.0));
  BoundaryDatum f{{0.0, 1.0, 2.0, 1.0}, "x+y"};
  const auto bf = brute_force_min(sq, mats, f);
  const auto sol = solve(sq, mats, f);
  CHECK(bf.u[4] == doctest::Approx(sol.u[4]).epsilon(1e-6));
  CHECK(bf.energy == doctest::Approx(dirichlet_energy(sol)).epsilon(1e-9));
}

TEST_CASE("brute force with zero data returns the zero field") {
  const Mesh m = build_disk_mesh(1.0, 0.45);
  MaterialMap mats;
  mats.set(0, ConductivityModel::power_law(1.0, 1.0, 4.0));
  const BoundaryDatum zero{std::vector<double>(m.boundary_nodes().size(), 0.0), "0"};
  const auto bf = brute_force_min(m, mats, zero);
  CHECK(bf.energy == doctest::Approx(0.0));
  for (double v : bf.u) CHECK(std::abs(v) < 1e-8);
}
