#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "monodtn/constitutive.hpp"

using namespace monodtn;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

std::vector<ConductivityModel> shipped_laws() {
  return {ConductivityModel::linear(5.55e7),
          ConductivityModel::power_law(1.0, 1.0, 1.2),
          ConductivityModel::power_law(1.0, 1.0, 1.5),
          ConductivityModel::power_law(1.0, 1.0, 3.0),
          ConductivityModel::power_law(2.5, 0.3, 4.0),
          ConductivityModel::ej_power_law(8e9, 1e-4, 27.0),
          ConductivityModel::tabulated({{0, 0}, {1, 2}, {2, 3}, {4, 3.5}})};
}

}  // namespace

TEST_CASE("linear law") {
  const auto m = ConductivityModel::linear(3.0);
  CHECK(m.sigma(0.0) == 3.0);
  CHECK(m.sigma(7.0) == 3.0);
  CHECK(m.flux(2.0) == 6.0);
  CHECK(m.energy_density(2.0) == doctest::Approx(6.0));
  CHECK(m.growth_exponent() == 2.0);
}

TEST_CASE("power law closed forms above the regularization floor") {
  const auto m = ConductivityModel::power_law(2.0, 0.5, 3.0, 0.0);
  for (double e : {0.01, 0.5, 1.0, 4.0}) {
    CHECK(m.sigma(e) == doctest::Approx(2.0 * std::pow(e / 0.5, 1.0)).epsilon(1e-14));
    CHECK(m.energy_density(e) == doctest::Approx(2.0 * 0.25 * std::pow(e / 0.5, 3.0) / 3.0).epsilon(1e-14));
  }
  // The regularized law matches up to the splice constant.
  const auto r = ConductivityModel::power_law(2.0, 0.5, 3.0);
  const double c = r.energy_density(1.0) - m.energy_density(1.0);
  CHECK(r.energy_density(3.0) - m.energy_density(3.0) == doctest::Approx(c).epsilon(1e-12));
  CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("regularized splice is C1 and quadratic below the floor") {
  for (double p : {1.2, 1.5, 3.0, 4.0}) {
    CAPTURE(p);
    const auto m = ConductivityModel::power_law(1.0, 1.0, p, 1e-3);
    const double eps = m.reg_eps();
    const double s = m.sigma(eps);
    CHECK(m.sigma(0.0) == doctest::Approx(s));
    CHECK(m.sigma(0.5 * eps) == doctest::Approx(s));
    CHECK(m.energy_density(0.5 * eps) == doctest::Approx(0.125 * s * eps * eps).epsilon(1e-14));
    CHECK(m.flux(eps * (1 - 1e-12)) == doctest::Approx(m.flux(eps * (1 + 1e-12))).epsilon(1e-9));
    CHECK(m.energy_density(eps * (1 - 1e-12)) == doctest::Approx(m.energy_density(eps * (1 + 1e-12))).epsilon(1e-9));
    CHECK(m.energy_density(0.0) == 0.0);
  }
}

TEST_CASE("E-J law") {
  const auto m = ConductivityModel::ej_power_law(8e9, 1e-4, 27.0);
  CHECK(m.sigma(1e-4) == doctest::Approx(8e13).epsilon(1e-14));
  CHECK(m.flux(1e-4) == doctest::Approx(8e9).epsilon(1e-14));
  CHECK(*m.growth_exponent() == doctest::Approx(28.0 / 27.0));
  CHECK(m.flux(1e-2) == doctest::Approx(8e9 * std::pow(100.0, 1.0 / 27.0)).epsilon(1e-13));
  CHECK(m.reg_eps() == doctest::Approx(1e-10));
}

TEST_CASE("dflux matches central differences above reg_eps") {
  for (const auto& m : shipped_laws()) {
    CAPTURE(to_string(m.kind()));
    const double lo = std::max(m.reg_eps(), 1e-9) * 3.0;
    for (double e : log_grid(lo, 1e3, 40)) {
      if (m.kind() == LawKind::Tabulated && std::abs(e - std::round(e)) < 1e-3) continue;  // kinks
      const double h = 1e-6 * e;
      const double fd = (m.flux(e + h) - m.flux(e - h)) / (2 * h);
      CHECK(m.dflux(e) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("energy density is the integral of the flux") {
  for (const auto& m : shipped_laws()) {
    CAPTURE(to_string(m.kind()));
    const double a = std::max(m.reg_eps(), 1e-6) * 2, b = 3.5;
    // Simpson with many panels.
    const int n = 20000;
    double s = m.flux(a) + m.flux(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * m.flux(a + (b - a) * i / n);
    s *= (b - a) / (3.0 * n);
    CHECK(m.energy_density(b) - m.energy_density(a) == doctest::Approx(s).epsilon(1e-6));
  }
}

TEST_CASE("flux is strictly increasing for the shipped laws") {
  for (const auto& m : shipped_laws()) {
    CAPTURE(to_string(m.kind()));
    CHECK(m.has_monotone_flux());
    double prev = -1.0;
    for (double e : log_grid(std::max(m.reg_eps(), 1e-12), 1e6, 300)) {
      const double f = m.flux(e);
      CHECK(f > prev);
      prev = f;
    }
  }
}

TEST_CASE("structural laws do not evaluate") {
  CHECK_THROWS_AS(ConductivityModel::pec().sigma(1.0), std::logic_error);
  CHECK_THROWS_AS(ConductivityModel::pei().energy_density(1.0), std::logic_error);
  CHECK(ConductivityModel::pec().is_structural());
  CHECK_FALSE(ConductivityModel::pec().growth_exponent().has_value());
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(ConductivityModel::linear(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ConductivityModel::power_law(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConductivityModel::power_law(-1.0, 1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(ConductivityModel::ej_power_law(8e9, 1e-4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ConductivityModel::tabulated({{0, 0}, {1, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(ConductivityModel::tabulated({{0.1, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("tabulated law interpolates and extrapolates linearly") {
  const auto m = ConductivityModel::tabulated({{0, 0}, {1, 2}, {3, 3}});
  CHECK(m.flux(0.5) == doctest::Approx(1.0));
  CHECK(m.flux(2.0) == doctest::Approx(2.5));
  CHECK(m.flux(5.0) == doctest::Approx(4.0));
  CHECK(m.energy_density(1.0) == doctest::Approx(1.0));
  CHECK(m.energy_density(3.0) == doctest::Approx(1.0 + 5.0));

  const auto bad = ConductivityModel::tabulated({{0, 0}, {1, 2}, {2, 1.5}});
  CHECK_FALSE(bad.has_monotone_flux());
  MaterialMap mm;
  mm.set(0, ConductivityModel::linear(1.0));
  mm.set(1, bad);
  CHECK_THROWS_WITH_AS(mm.check(std::vector<int>{0, 1}), doctest::Contains("monotone"), std::invalid_argument);
}

TEST_CASE("scaling multiplies flux and energy") {
  for (const auto& m : shipped_laws()) {
    const auto s = m.scaled(10.0);
    for (double e : {1e-3, 0.7, 20.0}) {
      CHECK(s.flux(e) == doctest::Approx(10.0 * m.flux(e)).epsilon(1e-12));
      CHECK(s.energy_density(e) == doctest::Approx(10.0 * m.energy_density(e)).epsilon(1e-12));
    }
  }
}

TEST_CASE("material map checks") {
  MaterialMap mm;
  mm.set(0, ConductivityModel::power_law(1.0, 1.0, 3.0));
  mm.set(1, ConductivityModel::power_law(1.0, 1.0, 1.5));
  CHECK_NOTHROW(mm.check(std::vector<int>{0, 1}));
  CHECK_THROWS_AS(mm.check(std::vector<int>{0, 1, 2}), std::invalid_argument);
  CHECK(*mm.outer_exponent() == 3.0);
  CHECK(*mm.inner_exponent() == 1.5);

  MaterialMap bad;
  bad.set(0, ConductivityModel::pei());
  CHECK_THROWS_AS(bad.check(std::vector<int>{0}), std::invalid_argument);
}

TEST_CASE("JSON round trip and strict keys") {
  const nlohmann::json doc = nlohmann::json::parse(R"({"regions":{
    "0":{"type":"linear","sigma":5.55e7},
    "1":{"type":"ej","Jc":8e9,"E0":1e-4,"n":27},
    "2":{"type":"power","sigma_bar":2,"E0":0.5,"p":4,"reg_eps":1e-9},
    "3":{"type":"pec"}, "4":{"type":"pei"},
    "5":{"type":"tabulated","samples":[[0,0],[1,2],[2,3]]}}})");
  const MaterialMap mm = materials_from_json(doc);
  CHECK(mm.regions().size() == 6);
  CHECK(mm.at(2).reg_eps() == 1e-9);
  CHECK(materials_from_json(materials_to_json(mm)) == mm);

  CHECK_THROWS_WITH(materials_from_json(nlohmann::json::parse(R"({"regions":{"0":{"type":"linear","sigma":1,"p":2}}})")),
                    doctest::Contains("unknown key"));
  CHECK_THROWS(materials_from_json(nlohmann::json::parse(R"({"regions":{"0":{"type":"plasma"}}})")));
  CHECK_THROWS(materials_from_json(nlohmann::json::parse(R"({"regions":{"a":{"type":"pec"}}})")));
  CHECK_THROWS(materials_from_json(nlohmann::json::parse(R"({"regions":{},"extra":1})")));
}

TEST_CASE("growth bounds") {
  const auto grid = log_grid(1e-3, 1e3, 61);
  const auto p3 = ConductivityModel::power_law(2.0, 1.0, 3.0);
  CHECK(check_growth_bounds(p3, 3.0, 2.0, 2.0, 1.0, grid).passed);
  const auto p15 = ConductivityModel::power_law(2.0, 1.0, 1.5);
  CHECK(check_growth_bounds(p15, 1.5, 2.0, 2.0, 1.0, grid).passed);
  // A linear law violates p = 3 bounds at small fields.
  const auto lin = ConductivityModel::linear(1.0);
  const auto r = check_growth_bounds(lin, 3.0, 1.0, 1.0, 1.0, grid);
  CHECK_FALSE(r.passed);
  REQUIRE(r.witness_e.has_value());
  CHECK(*r.witness_e > 1.0);
}

TEST_CASE("strong monotonicity on random field pairs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<std::pair<Vec2, Vec2>> pairs;
  for (int i = 0; i < 2000; ++i) pairs.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}});

  const auto p4 = ConductivityModel::power_law(1.0, 1.0, 4.0, 0.0);
  const auto r4 = check_strong_monotonicity(p4, 4.0, 0.05, pairs);
  CHECK(r4.passed);
  CHECK(r4.best_kappa > 0.05);

  const auto p15 = ConductivityModel::power_law(1.0, 1.0, 1.5);
  const auto r15 = check_strong_monotonicity(p15, 1.5, 0.1, pairs);
  CHECK(r15.passed);

  // A decreasing flux segment is caught.
  const auto bad = ConductivityModel::tabulated({{0, 0}, {1, 2}, {2, 1}, {4, 5}});
  const auto rb = check_strong_monotonicity(bad, 2.0, 1e-3, pairs);
  CHECK_FALSE(rb.passed);
  CHECK(rb.witness.has_value());
}
