// Batch front end. Exit codes: 0 ok, 2 config/validation, 3 property
// violation, 4 solver non-convergence.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "monodtn/config.hpp"
#include "monodtn/dtn.hpp"
#include "monodtn/imaging.hpp"
#include "monodtn/monotonicity.hpp"
#include "monodtn/oracle.hpp"
#include "monodtn/parallel.hpp"
#include "monodtn/wire.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace monodtn;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  int workers = default_workers();
  std::uint64_t seed = 0;
  std::optional<int> quad_order;
  bool check_only = false;
  bool seed_given = false;
};

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed config " + path + ": " + e.what());
  }
}

class Outputs {
 public:
  Outputs(const Common& c, std::string command) : dir_(c.out), command_(std::move(command)), common_(c) {
    started_ = now();
  }
  void write(const std::string& name, const std::string& body) {
    if (common_.check_only) return;
    fs::create_directories(dir_);
    std::ofstream(dir_ / name, std::ios::binary) << body;
    files_.push_back(name);
  }
  // Wall-clock data lives only here, never in the CSV bodies.
  void finish(int exit_code) {
    if (common_.check_only) return;
    json meta;
    meta["command"] = command_;
    meta["config"] = common_.config;
    meta["seed"] = common_.seed;
    meta["workers"] = common_.workers;
    meta["started"] = started_;
    meta["finished"] = now();
    meta["exit_code"] = exit_code;
    meta["files"] = files_;
    fs::create_directories(dir_);
    std::ofstream(dir_ / "metadata.json") << meta.dump(2) << '\n';
  }

 private:
  static std::string now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
  }
  fs::path dir_;
  std::string command_;
  const Common& common_;
  std::string started_;
  std::vector<std::string> files_;
};

std::string quoted(const std::string& s) { return '"' + s + '"'; }

DtnOptions dtn_options(const json& cfg, const Common& c) {
  DtnOptions o;
  if (cfg.contains("solver")) o.solve = solve_options_from_json(cfg.at("solver"));
  o.quad_order = c.quad_order.value_or(cfg.value("quad_order", o.quad_order));
  if (cfg.contains("quad_map")) o.map = quad_map_from_string(cfg.at("quad_map").get<std::string>());
  if (o.quad_order < 1) throw std::invalid_argument("quad_order must be positive");
  return o;
}

std::vector<BoundaryDatum> data_of(const Mesh& mesh, const json& cfg) {
  return datum_family(mesh, data_specs_from_json(cfg.at("data")));
}

// ---------------------------------------------------------------------------

int cmd_mesh_gen(const Common& c) {
  const json cfg = read_config(c.config);
  require_known_keys(cfg, {"mesh"}, "mesh-gen config");
  Outputs out(c, "mesh-gen");
  const Mesh mesh = mesh_from_spec(cfg.at("mesh"));
  const auto labels = mesh.labels();
  std::ostringstream report;
  report << "nodes,triangles,boundary_nodes,regions,area\n"
         << mesh.num_nodes() << ',' << mesh.num_triangles() << ',' << mesh.boundary_nodes().size() << ','
         << labels.size() << ',' << fmt17(mesh.total_area()) << '\n';
  std::cout << report.str();
  out.write("mesh.json", mesh_to_json_text(mesh));
  out.write("mesh_report.csv", report.str());
  out.finish(0);
  return 0;
}

int cmd_solve(const Common& c, bool fields) {
  const json cfg = read_config(c.config);
  require_known_keys(cfg, {"mesh", "materials", "data", "solver"}, "solve config");
  const Mesh mesh = mesh_from_spec(cfg.at("mesh"));
  const MaterialMap mats = materials_from_spec(cfg.at("materials"));
  const auto data = data_of(mesh, cfg);
  const SolveOptions opts = cfg.contains("solver") ? solve_options_from_json(cfg.at("solver")) : SolveOptions{};
  const EnergyProblem problem(mesh, mats);
  if (c.check_only) return 0;

  Outputs out(c, fields ? "solve" : "power");
  const int nd = static_cast<int>(data.size());
  std::vector<PotentialField> sol(nd);
  std::vector<double> power(nd);
  parallel_for(nd, c.workers, [&](int i) {
    sol[i] = problem.solve(data[i], opts);
    power[i] = dtn_pairing(problem, sol[i], data[i].values);
  });
  std::ostringstream csv;
  csv << "datum_id,power,energy,newton_iterations\n";
  for (int i = 0; i < nd; ++i) {
    csv << quoted(data[i].descriptor) << ',' << fmt17(power[i]) << ',' << fmt17(problem.energy(sol[i].u)) << ','
        << sol[i].stats.newton_iterations << '\n';
    if (fields) {
      std::ostringstream nodes, elems;
      write_node_csv(nodes, sol[i]);
      write_element_csv(elems, sol[i]);
      out.write("nodes_" + std::to_string(i) + ".csv", nodes.str());
      out.write("elements_" + std::to_string(i) + ".csv", elems.str());
    }
  }
  out.write(fields ? "solve.csv" : "power.csv", csv.str());
  out.finish(0);
  return 0;
}

int cmd_avg_power(const Common& c) {
  const json cfg = read_config(c.config);
  require_known_keys(cfg, {"mesh", "materials", "data", "solver", "quad_order", "quad_map", "max_transfer_residual"},
                     "avg-power config");
  const Mesh mesh = mesh_from_spec(cfg.at("mesh"));
  const MaterialMap mats = materials_from_spec(cfg.at("materials"));
  const auto data = data_of(mesh, cfg);
  const DtnOptions opts = dtn_options(cfg, c);
  const EnergyProblem problem(mesh, mats);
  if (c.check_only) return 0;

  Outputs out(c, "avg-power");
  const int nd = static_cast<int>(data.size());
  std::vector<PowerReport> reps(nd);
  parallel_for(nd, c.workers, [&](int i) { reps[i] = average_dtn_power(problem, data[i], opts); });
  std::ostringstream csv, samples;
  write_power_csv_header(csv);
  samples << "datum_id,alpha,weight,pairing\n";
  json js = json::array();
  double worst = 0.0;
  for (int i = 0; i < nd; ++i) {
    write_power_csv_row(csv, data[i].descriptor, "materials", reps[i]);
    for (const auto& s : reps[i].samples) {
      samples << quoted(data[i].descriptor) << ',' << fmt17(s.alpha) << ',' << fmt17(s.weight) << ','
              << fmt17(s.pairing) << '\n';
    }
    js.push_back(to_json(reps[i]));
    worst = std::max(worst, reps[i].transfer_residual);
  }
  out.write("avg_power.csv", csv.str());
  out.write("samples.csv", samples.str());
  out.write("avg_power.json", js.dump(2) + "\n");
  int code = 0;
  if (cfg.contains("max_transfer_residual") && worst > cfg.at("max_transfer_residual").get<double>()) {
    std::cerr << "transfer residual " << fmt17(worst) << " exceeds the configured bound\n";
    code = 3;
  }
  out.finish(code);
  return code;
}

int cmd_suite(const Common& c) {
  const json cfg = read_config(c.config);
  require_known_keys(cfg, {"meshes", "pairs", "ladders", "data", "solver", "quad_order", "quad_map", "energy_only"},
                     "monotonicity-suite config");
  CompareOptions copts;
  copts.dtn = dtn_options(cfg, c);
  copts.workers = c.workers;
  const bool energy_only = cfg.value("energy_only", false);

  // Certificates first: nothing is solved for an uncertified suite.
  std::vector<OrderedPair> pairs;
  for (const auto& p : cfg.value("pairs", json::array())) {
    require_known_keys(p, {"name", "lo", "hi"}, "pair");
    pairs.push_back(make_pair(p.at("name").get<std::string>(), materials_from_spec(p.at("lo")),
                              materials_from_spec(p.at("hi"))));
    if (!pairs.back().certificate.holds) {
      throw CertificateError("order certificate failed for " + pairs.back().name + ": " +
                             pairs.back().certificate.message);
    }
  }
  struct Ladder {
    std::string name;
    MaterialMap base;
    std::vector<int> inclusion;
  };
  std::vector<Ladder> ladders;
  for (const auto& l : cfg.value("ladders", json::array())) {
    require_known_keys(l, {"name", "base", "inclusion"}, "ladder");
    ladders.push_back({l.at("name").get<std::string>(), materials_from_spec(l.at("base")),
                       l.at("inclusion").get<std::vector<int>>()});
  }
  std::vector<Mesh> meshes;
  for (const auto& m : cfg.at("meshes")) meshes.push_back(mesh_from_spec(m));
  for (const auto& mesh : meshes) {
    for (const auto& p : pairs) {
      p.lo.check(mesh.labels());
      p.hi.check(mesh.labels());
    }
  }
  if (c.check_only) return 0;

  Outputs out(c, "monotonicity-suite");
  std::ostringstream suite, summary, ladder_csv;
  suite << "mesh,pair,cross_regime,datum,power_lo,power_hi,delta,energy_lo,energy_hi,energy_delta,"
           "residual_lo,residual_hi,tolerance,violation\n";
  summary << "mesh,pair,cross_regime,rows,violations,energy_violations\n";
  ladder_csv << "mesh,ladder,datum,PEI,sigma/10,sigma,10sigma,PEC,nondecreasing\n";
  int violations = 0;
  auto emit = [&](std::size_t mi, const MonotonicityReport& r) {
    for (const auto& row : r.rows) {
      suite << mi << ',' << quoted(r.pair) << ',' << r.cross_regime << ',' << quoted(row.datum) << ','
            << fmt17(row.power_lo) << ',' << fmt17(row.power_hi) << ',' << fmt17(row.delta) << ','
            << fmt17(row.energy_lo) << ',' << fmt17(row.energy_hi) << ',' << fmt17(row.energy_delta) << ','
            << fmt17(row.residual_lo) << ',' << fmt17(row.residual_hi) << ',' << fmt17(row.tolerance) << ','
            << ((row.violation || row.energy_violation) ? 1 : 0) << '\n';
    }
    summary << mi << ',' << quoted(r.pair) << ',' << r.cross_regime << ',' << r.rows.size() << ','
            << r.violations << ',' << r.energy_violations << '\n';
    violations += r.total_violations();
  };
  for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
    const auto data = data_of(meshes[mi], cfg);
    for (const auto& p : pairs) {
      emit(mi, energy_only ? energy_compare(meshes[mi], p, data, copts) : avg_dtn_compare(meshes[mi], p, data, copts));
    }
    for (const auto& l : ladders) {
      const LadderReport lr = ladder_suite(meshes[mi], l.base, l.inclusion, data, copts);
      for (auto r : lr.pairs) {
        r.pair = l.name + ": " + r.pair;
        emit(mi, r);
      }
      for (std::size_t d = 0; d < data.size(); ++d) {
        ladder_csv << mi << ',' << quoted(l.name) << ',' << quoted(data[d].descriptor);
        bool up = true;
        for (std::size_t r = 0; r < lr.powers.size(); ++r) {
          ladder_csv << ',' << fmt17(lr.powers[r][d]);
          if (r > 0 && lr.powers[r][d] < lr.powers[r - 1][d]) up = false;
        }
        ladder_csv << ',' << up << '\n';
      }
      if (!lr.nondecreasing) ++violations;
    }
  }
  out.write("suite.csv", suite.str());
  out.write("summary.csv", summary.str());
  if (!ladders.empty()) out.write("ladder.csv", ladder_csv.str());
  std::cout << "violations: " << violations << '\n';
  const int code = violations > 0 ? 3 : 0;
  out.finish(code);
  return code;
}

int cmd_gateaux(const Common& c) {
  const json cfg = read_config(c.config);
  require_known_keys(cfg, {"mesh", "materials", "data", "directions", "eps", "solver", "threshold"},
                     "gateaux-check config");
  const Mesh mesh = mesh_from_spec(cfg.at("mesh"));
  const MaterialMap mats = materials_from_spec(cfg.at("materials"));
  const auto data = data_of(mesh, cfg);
  const auto dirs = datum_family(mesh, data_specs_from_json(cfg.at("directions")));
  const auto eps = cfg.value("eps", std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4});
  const double threshold = cfg.value("threshold", 1e-3);
  const SolveOptions opts = cfg.contains("solver") ? solve_options_from_json(cfg.at("solver")) : SolveOptions{};
  const EnergyProblem problem(mesh, mats);
  if (c.check_only) return 0;

  Outputs out(c, "gateaux-check");
  const int nd = static_cast<int>(data.size()), nphi = static_cast<int>(dirs.size());
  std::vector<GateauxReport> reps(nd * nphi);
  parallel_for(nd * nphi, c.workers,
               [&](int k) { reps[k] = gateaux_check(problem, data[k / nphi], dirs[k % nphi], eps, opts); });
  std::ostringstream csv;
  csv << "f,phi,eps,quotient,pairing,residual,relative\n";
  bool ok = true;
  for (int k = 0; k < nd * nphi; ++k) {
    const auto& r = reps[k];
    for (const auto& row : r.rows) {
      csv << quoted(data[k / nphi].descriptor) << ',' << quoted(dirs[k % nphi].descriptor) << ','
          << fmt17(row.eps) << ',' << fmt17(row.quotient) << ',' << fmt17(r.pairing) << ','
          << fmt17(row.residual) << ',' << fmt17(row.residual / r.scale) << '\n';
    }
    ok = ok && r.monotone && r.final_relative <= threshold;
  }
  out.write("gateaux.csv", csv.str());
  const int code = ok ? 0 : 3;
  out.finish(code);
  return code;
}

int cmd_convergence(const Common& c) {
  const json cfg = read_config(c.config);
  const std::string kind = cfg.value("kind", "continuity");
  Outputs out(c, "convergence-study");
  std::ostringstream csv;
  bool ok = true;
  if (kind == "continuity") {
    require_known_keys(cfg, {"kind", "mesh", "materials", "f", "phi", "eps", "p", "solver"},
                       "convergence-study config");
    const Mesh mesh = mesh_from_spec(cfg.at("mesh"));
    const MaterialMap mats = materials_from_spec(cfg.at("materials"));
    const auto f = datum_from_expression(mesh, cfg.at("f").get<std::string>());
    const auto phi = datum_from_expression(mesh, cfg.at("phi").get<std::string>());
    const auto eps = cfg.value("eps", std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4});
    const auto outer = mats.outer_exponent();
    const double p = cfg.contains("p") ? cfg.at("p").get<double>() : outer.value_or(2.0);
    const SolveOptions opts = cfg.contains("solver") ? solve_options_from_json(cfg.at("solver")) : SolveOptions{};
    const EnergyProblem problem(mesh, mats);
    if (c.check_only) return 0;
    const auto rep = boundary_data_continuity_study(problem, f, phi, eps, p, opts);
    csv << "eps,difference\n";
    for (const auto& row : rep.rows) csv << fmt17(row.eps) << ',' << fmt17(row.difference) << '\n';
    out.write("continuity.csv", csv.str());
    std::ostringstream s;
    s << "p,slope,required_slope,monotone,passed\n"
      << fmt17(p) << ',' << fmt17(rep.slope) << ',' << fmt17(rep.required_slope) << ',' << rep.monotone << ','
      << rep.passed << '\n';
    out.write("continuity_summary.csv", s.str());
    ok = rep.passed;
  } else if (kind == "annulus") {
    require_known_keys(cfg, {"kind", "p", "r1", "r2", "u1", "u2", "sigma_bar", "E0", "radial", "angular", "levels",
                             "solver", "max_final_error", "min_order"},
                       "convergence-study config");
    const auto ps = cfg.value("p", std::vector<double>{1.2, 2.0, 4.0});
    const double r1 = cfg.value("r1", 1.0), r2 = cfg.value("r2", 2.0);
    const double u1 = cfg.value("u1", 0.0), u2 = cfg.value("u2", 1.0);
    const double sb = cfg.value("sigma_bar", 1.0), e0 = cfg.value("E0", 1.0);
    const int radial = cfg.value("radial", 4), angular = cfg.value("angular", 32), levels = cfg.value("levels", 3);
    const double max_err = cfg.value("max_final_error", 0.01), min_order = cfg.value("min_order", 1.0);
    const SolveOptions opts = cfg.contains("solver") ? solve_options_from_json(cfg.at("solver")) : SolveOptions{};
    if (c.check_only) return 0;
    csv << "p,level,radial,angular,energy,exact,rel_error,order\n";
    for (double p : ps) {
      const auto exact = annulus_radial_solution(p, sb, e0, r1, r2, u1, u2);
      double prev = 0.0;
      for (int l = 0; l < levels; ++l) {
        const Mesh m = build_annulus_mesh(r1, r2, radial << l, angular << l);
        char expr[160];
        std::snprintf(expr, sizeof expr, "%.17g + (%.17g) * (r - %.17g)", u1, (u2 - u1) / (r2 - r1), r1);
        MaterialMap mm;
        mm.set(0, p == 2.0 ? ConductivityModel::linear(sb) : ConductivityModel::power_law(sb, e0, p));
        const EnergyProblem prob(m, mm);
        const double e = prob.energy(prob.solve(datum_from_expression(m, expr), opts).u);
        const double err = std::abs(e - exact.energy()) / exact.energy();
        const double order = l > 0 ? std::log2(prev / err) : 0.0;
        csv << fmt17(p) << ',' << l << ',' << (radial << l) << ',' << (angular << l) << ',' << fmt17(e) << ','
            << fmt17(exact.energy()) << ',' << fmt17(err) << ',' << fmt17(order) << '\n';
        if (l > 0 && order < min_order) ok = false;
        if (l == levels - 1 && err > max_err) ok = false;
        prev = err;
      }
    }
    out.write("annulus.csv", csv.str());
  } else {
    throw std::invalid_argument("unknown convergence-study kind \"" + kind + "\"");
  }
  const int code = ok ? 0 : 3;
  out.finish(code);
  return code;
}

int cmd_mpm(const Common& c) {
  const json cfg = read_config(c.config);
  require_known_keys(cfg, {"mesh", "materials", "cells", "truth", "contrast", "noise_rel", "data", "solver",
                           "quad_order", "quad_map", "seed"},
                     "mpm-image config");
  const Mesh mesh = mesh_from_spec(cfg.at("mesh"));
  const MaterialMap background = materials_from_spec(cfg.at("materials"));
  background.check(mesh.labels());
  std::vector<int> cell_labels;
  if (cfg.contains("cells")) {
    cell_labels = cfg.at("cells").get<std::vector<int>>();
  } else {
    for (int l : mesh.labels()) {
      if (l != 0) cell_labels.push_back(l);
    }
  }
  const CellGrid grid = cells_from_labels(mesh, cell_labels);
  const auto truth = cfg.value("truth", std::vector<int>{});
  const Contrast contrast = contrast_from_string(cfg.value("contrast", std::string("PEI")));
  const double noise = cfg.value("noise_rel", 0.0);
  if (!(noise >= 0.0)) throw std::invalid_argument("noise_rel must be nonnegative");
  const std::uint64_t seed = c.seed_given ? c.seed : cfg.value("seed", std::uint64_t{0});
  const auto data = data_of(mesh, cfg);
  const DtnOptions opts = dtn_options(cfg, c);
  MaterialMap true_map = background;
  for (int l : truth) {
    true_map.set(l, contrast == Contrast::PEI ? ConductivityModel::pei() : ConductivityModel::pec());
  }
  true_map.check(mesh.labels());
  if (c.check_only) return 0;

  Outputs out(c, "mpm-image");
  const Measurements meas = synth_measurements(mesh, true_map, data, opts, noise, seed, c.workers);
  const MpmResult r = mpm_scan(mesh, background, meas, grid, contrast, data, opts, c.workers);
  json j = to_json(r);
  j["seed"] = seed;
  j["truth"] = truth;
  std::ostringstream ind, mcsv, svg;
  ind << "label,indicator,flagged\n";
  for (std::size_t k = 0; k < r.labels.size(); ++k) {
    ind << r.labels[k] << ',' << fmt17(r.indicators[k]) << ',' << int(r.mask[k]) << '\n';
  }
  mcsv << "datum,clean,measured\n";
  for (std::size_t f = 0; f < meas.values.size(); ++f) {
    mcsv << quoted(meas.data[f]) << ',' << fmt17(meas.clean[f]) << ',' << fmt17(meas.values[f]) << '\n';
  }
  int code = 0;
  if (!truth.empty()) {
    const MaskMetrics mm = mask_metrics(r, truth);
    j["metrics"] = {{"contains", mm.contains}, {"excess", mm.excess}, {"jaccard", mm.jaccard}};
    std::cout << "contains " << mm.contains << " excess " << mm.excess << " jaccard " << mm.jaccard << '\n';
    if (!mm.contains) code = 3;
  }
  write_mpm_svg(svg, mesh, grid, r);
  out.write("mpm.json", j.dump(2) + "\n");
  out.write("indicators.csv", ind.str());
  out.write("measurements.csv", mcsv.str());
  out.write("mpm.svg", svg.str());
  out.finish(code);
  return code;
}

int cmd_wire(const Common& c) {
  const json cfg = read_config(c.config);
  require_known_keys(cfg, {"geometry", "parameters", "data", "damaged_petal", "solver"}, "reproduce-wire config");
  const WireGeometry geom = wire_geometry_from_json(cfg.value("geometry", json::object()));
  const WireMaterials mats = wire_materials_from_json(cfg.value("parameters", json::object()));
  const int petal = cfg.value("damaged_petal", 1);
  const Mesh mesh = build_wire_mesh(geom);
  const auto data = datum_family(mesh, data_specs_from_json(cfg.value("data", json{{"family", "wire"}})));
  CompareOptions copts;
  if (cfg.contains("solver")) copts.dtn.solve = solve_options_from_json(cfg.at("solver"));
  copts.workers = c.workers;
  const OrderedPair crack = make_pair("cracked <= healthy", cracked_wire(geom, mats), healthy_wire(geom, mats));
  const OrderedPair pet = make_pair("petal <= healthy", damaged_petal_wire(geom, mats, petal), healthy_wire(geom, mats));
  for (const auto* p : {&crack, &pet}) {
    if (!p->certificate.holds) throw CertificateError("order certificate failed for " + p->name);
  }
  if (c.check_only) return 0;

  Outputs out(c, "reproduce-wire");
  int bad = 0;
  for (const auto& [name, pair] : {std::pair{"table1.csv", &crack}, std::pair{"table2.csv", &pet}}) {
    const auto rep = energy_compare(mesh, *pair, data, copts);
    std::ostringstream csv;
    csv << "f,E0,E1,difference,ratio\n";
    for (const auto& row : rep.rows) {
      csv << quoted(row.datum) << ',' << fmt17(row.energy_hi) << ',' << fmt17(row.energy_lo) << ','
          << fmt17(row.energy_delta) << ',' << fmt17(row.energy_delta / row.energy_hi) << '\n';
      if (!(row.energy_delta > 0.0)) ++bad;
    }
    out.write(name, csv.str());
    std::cout << name << ":\n" << csv.str();
  }
  const int code = bad > 0 ? 3 : 0;
  out.finish(code);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasilinear conduction, averaged DtN maps and monotonicity tests"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "JSON config")->required();
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--quad-order", c.quad_order, "Gauss-Legendre order in alpha")->check(CLI::PositiveNumber);
    sub->add_flag("--check-only", c.check_only, "validate the config, compute nothing, write nothing");
    return sub;
  };
  struct Entry {
    const char* name;
    const char* help;
    std::function<int()> run;
  };
  const std::vector<Entry> entries = {
      {"mesh-gen", "build and validate a mesh", [&] { return cmd_mesh_gen(c); }},
      {"solve", "minimize the energy and dump fields", [&] { return cmd_solve(c, true); }},
      {"power", "DtN power <Lambda f, f>", [&] { return cmd_solve(c, false); }},
      {"avg-power", "averaged DtN power by quadrature", [&] { return cmd_avg_power(c); }},
      {"monotonicity-suite", "ordered-pair comparisons and ladders", [&] { return cmd_suite(c); }},
      {"gateaux-check", "difference quotients of the energy", [&] { return cmd_gateaux(c); }},
      {"convergence-study", "boundary-data continuity or annulus refinement", [&] { return cmd_convergence(c); }},
      {"mpm-image", "cell-scan imaging of a phantom", [&] { return cmd_mpm(c); }},
      {"reproduce-wire", "healthy vs damaged wire energy tables", [&] { return cmd_wire(c); }},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) subs.push_back(add_common(app.add_subcommand(e.name, e.help)));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (auto* s : subs) c.seed_given = c.seed_given || s->count("--seed") > 0;

  try {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (subs[i]->parsed()) return entries[i].run();
    }
  } catch (const SolverError& e) {
    std::cerr << "solver: " << e.what() << '\n';
    return 4;
  } catch (const CertificateError& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
