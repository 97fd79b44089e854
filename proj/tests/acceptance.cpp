// One line per acceptance criterion. Criteria that go through the CLI leave
// their outputs under <workdir>/run1; criterion 10 repeats every subcommand
// into run2 and compares the CSV bytes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monodtn/config.hpp"
#include "monodtn/datum.hpp"
#include "monodtn/dtn.hpp"
#include "monodtn/imaging.hpp"
#include "monodtn/oracle.hpp"

namespace fs = std::filesystem;
using namespace monodtn;

namespace {

const fs::path kCli = MONODTN_CLI;
const fs::path kConfigs = MONODTN_CONFIGS;
fs::path g_work = "acceptance_runs";

using Row = std::map<std::string, std::string>;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<Row> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("missing " + p.string());
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    Row r;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

double num(const Row& r, const std::string& key) { return std::stod(r.at(key)); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load_config(const std::string& name) { return nlohmann::json::parse(std::ifstream(kConfigs / name)); }

struct CliRun {
  std::string command;
  std::string config;
  std::vector<std::string> extra;
  std::string tag;  // output subdirectory
};

int run_cli(const CliRun& r, const std::string& round) {
  const fs::path out = g_work / round / r.tag;
  fs::remove_all(out);
  std::string cmd = '"' + kCli.string() + "\" " + r.command + " --config \"" + (kConfigs / r.config).string() +
                    "\" --out \"" + out.string() + '"';
  for (const auto& e : r.extra) cmd += ' ' + e;
  cmd += " > \"" + (g_work / round).string() + "/" + r.tag + ".log\" 2>&1";
  fs::create_directories(g_work / round);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path run1(const std::string& tag) { return g_work / "run1" / tag; }

// Every subcommand and config the criteria exercise, in run order.
const std::vector<CliRun> kRuns = {
    {"mesh-gen", "mesh_disk.json", {}, "mesh_gen"},
    {"solve", "solve_linear_disk.json", {}, "solve"},
    {"power", "solve_linear_disk.json", {}, "power"},
    {"convergence-study", "annulus.json", {}, "annulus"},
    {"gateaux-check", "gateaux_p4.json", {}, "gateaux_p4"},
    {"gateaux-check", "gateaux.json", {}, "gateaux_two_phase"},
    {"gateaux-check", "gateaux_pei.json", {}, "gateaux_pei"},
    {"avg-power", "avg_power_wire.json", {"--quad-order", "8"}, "wire_q8"},
    {"avg-power", "avg_power_wire.json", {"--quad-order", "16"}, "wire_q16"},
    {"avg-power", "avg_power_linear.json", {}, "avg_linear"},
    {"avg-power", "avg_power_p4.json", {}, "avg_p4"},
    {"monotonicity-suite", "suite.json", {}, "suite"},
    {"reproduce-wire", "wire.json", {}, "wire"},
    {"convergence-study", "continuity_p4.json", {}, "continuity_p4"},
    {"convergence-study", "continuity_p12.json", {}, "continuity_p12"},
    {"mpm-image", "mpm_phantom.json", {"--seed", "42"}, "mpm"},
};

std::map<std::string, int> g_exit;

int exit_of(const std::string& tag) {
  if (!g_exit.count(tag)) {
    for (const auto& r : kRuns) {
      if (r.tag == tag) g_exit[tag] = run_cli(r, "run1");
    }
  }
  return g_exit.at(tag);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

// --------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const int code = exit_of("annulus");
  const auto rows = read_csv(run1("annulus") / "annulus.csv");
  bool ok = code == 0 && !rows.empty();
  std::string detail;
  for (double p : {1.2, 2.0, 4.0}) {
    double min_order = 1e300, final_err = 0.0;
    int n = 0;
    for (const auto& r : rows) {
      if (std::abs(num(r, "p") - p) > 1e-12) continue;
      ++n;
      if (num(r, "level") > 0) min_order = std::min(min_order, num(r, "order"));
      final_err = num(r, "rel_error");
    }
    ok = ok && n == 3 && min_order >= 1.0 && final_err <= 0.01;
    std::snprintf(buf, sizeof buf, "p=%g order>=%.2f err=%.2e; ", p, min_order, final_err);
    detail += buf;
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome brute_force_equivalence() {
  const Mesh m = build_disk_mesh(1.0, 0.25, {DiskShape{{0.05, 0.0}, 0.45, 1}});
  const auto lin = ConductivityModel::linear(1.0);
  const auto two = [](const ConductivityModel& a, const ConductivityModel& b) {
    MaterialMap mm;
    mm.set(0, a);
    mm.set(1, b);
    return mm;
  };
  const std::vector<std::pair<std::string, MaterialMap>> cases = {
      {"linear", two(lin, lin.scaled(3.0))},
      {"p=4", two(ConductivityModel::power_law(1, 1, 4), ConductivityModel::power_law(1, 1, 4))},
      {"p=1.2", two(ConductivityModel::power_law(1, 1, 1.2), ConductivityModel::power_law(1, 1, 1.2))},
      {"two-phase", two(ConductivityModel::power_law(1, 1, 3), ConductivityModel::power_law(2, 1, 1.5))},
      {"PEI", two(ConductivityModel::power_law(1, 1, 3), ConductivityModel::pei())},
  };
  const auto f = datum_from_expression(m, "x + 0.5 sin(2 theta)");
  bool ok = true;
  double worst = 0.0;
  int max_dof = 0;
  for (const auto& [name, mm] : cases) {
    const EnergyProblem prob(m, mm);
    max_dof = std::max(max_dof, prob.dofs().num_free());
    const double e = prob.energy(prob.solve(f).u);
    const auto bf = brute_force_min(m, mm, f);
    const double rel = std::abs(bf.energy - e) / e;
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-6;
  }
  ok = ok && max_dof <= 60;
  std::snprintf(buf, sizeof buf, "5 configurations, <= %d dof, worst relative gap %.2e", max_dof, worst);
  return {ok, buf};
}

Outcome gateaux_identity() {
  bool ok = true;
  double worst = 0.0;
  int series = 0;
  for (const char* tag : {"gateaux_p4", "gateaux_two_phase", "gateaux_pei"}) {
    if (exit_of(tag) != 0) ok = false;
    std::map<std::string, std::vector<double>> rel;
    for (const auto& r : read_csv(run1(tag) / "gateaux.csv")) rel[r.at("f") + "|" + r.at("phi")].push_back(num(r, "relative"));
    for (const auto& [_, v] : rel) {
      ++series;
      for (std::size_t i = 1; i < v.size(); ++i) ok = ok && v[i] < v[i - 1];
      ok = ok && v.size() == 4 && v.back() <= 1e-3;
      worst = std::max(worst, v.back());
    }
  }
  ok = ok && series == 6;
  std::snprintf(buf, sizeof buf, "3 regimes x 2 data, monotone, worst final relative %.2e", worst);
  return {ok, buf};
}

Outcome transfer_identity() {
  const int c8 = exit_of("wire_q8"), c16 = exit_of("wire_q16");
  const bool ran = c8 == 0 && c16 == 0;
  const double r8 = num(read_csv(run1("wire_q8") / "avg_power.csv").at(0), "transfer_residual");
  const double r16 = num(read_csv(run1("wire_q16") / "avg_power.csv").at(0), "transfer_residual");
  const bool ok = ran && r16 <= 1e-3 && r8 / r16 >= 4.0;
  std::snprintf(buf, sizeof buf, "wire, f=100x: order 8 %.2e, order 16 %.2e, shrink %.1fx", r8, r16, r8 / r16);
  return {ok, buf};
}

Outcome homogeneity() {
  const int cl = exit_of("avg_linear"), c4 = exit_of("avg_p4");
  bool ok = cl == 0 && c4 == 0;
  double wl = 0.0, w4 = 0.0;
  for (const auto& r : read_csv(run1("avg_linear") / "avg_power.csv")) {
    wl = std::max(wl, std::abs(num(r, "avg_power") / num(r, "power") - 0.5) / 0.5);
  }
  for (const auto& r : read_csv(run1("avg_p4") / "avg_power.csv")) {
    w4 = std::max(w4, std::abs(num(r, "avg_power") / num(r, "power") - 0.25) / 0.25);
  }
  ok = ok && wl <= 1e-10 && w4 <= 1e-6;
  std::snprintf(buf, sizeof buf, "linear max rel %.2e, p=4 max rel %.2e (10 data each)", wl, w4);
  return {ok, buf};
}

Outcome monotonicity_battery() {
  const int code = exit_of("suite");
  const auto cfg = load_config("suite.json");
  int violations = 0, rows = 0;
  for (const auto& r : read_csv(run1("suite") / "summary.csv")) {
    violations += static_cast<int>(num(r, "violations") + num(r, "energy_violations"));
    rows += static_cast<int>(num(r, "rows"));
  }
  const auto data = data_specs_from_json(cfg.at("data"));
  const bool shape = cfg.at("pairs").size() >= 4 && data.size() >= 10 && cfg.at("meshes").size() >= 3 &&
                     !cfg.at("ladders").empty();
  const bool ok = code == 0 && violations == 0 && shape;
  std::snprintf(buf, sizeof buf, "%zu pairs + ladder x %zu data x %zu meshes: %d rows, %d violations",
                cfg.at("pairs").size(), data.size(), cfg.at("meshes").size(), rows, violations);
  return {ok, buf};
}

Outcome wire_reproduction() {
  bool ok = exit_of("wire") == 0;
  double lo = 1e300, hi = 0.0;
  int n = 0;
  for (const char* t : {"table1.csv", "table2.csv"}) {
    for (const auto& r : read_csv(run1("wire") / t)) {
      ++n;
      const double d = num(r, "difference"), ratio = num(r, "ratio");
      ok = ok && d > 0.0 && ratio > 1e-3 && ratio < 1e-1;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  ok = ok && n == 20;
  std::snprintf(buf, sizeof buf, "%d rows, all differences > 0, ratios in [%.4f, %.4f]", n, lo, hi);
  return {ok, buf};
}

Outcome continuity() {
  bool ok = true;
  std::string detail;
  for (const char* tag : {"continuity_p4", "continuity_p12"}) {
    if (exit_of(tag) != 0) ok = false;
    const auto s = read_csv(run1(tag) / "continuity_summary.csv").at(0);
    const double p = num(s, "p"), slope = num(s, "slope");
    const double need = p >= 2.0 ? 1.0 / p - 0.1 : 0.4;
    ok = ok && slope >= need && s.at("monotone") == "1";
    std::snprintf(buf, sizeof buf, "p=%g slope %.3f (need %.3f); ", p, slope, need);
    detail += buf;
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome mpm_containment() {
  // Cell tests depend only on the background, so both phantoms share them.
  const auto cfg = load_config("mpm_phantom.json");
  const Mesh mesh = mesh_from_spec(cfg.at("mesh"));
  const MaterialMap background = materials_from_spec(cfg.at("materials"));
  std::vector<int> labels;
  for (int l : mesh.labels()) {
    if (l != 0) labels.push_back(l);
  }
  const CellGrid grid = cells_from_labels(mesh, labels);
  const auto data = datum_family(mesh, data_specs_from_json(cfg.at("data")));
  DtnOptions opts;
  opts.quad_order = cfg.at("quad_order").get<int>();
  const auto tests = cell_test_powers(mesh, background, grid, Contrast::PEI, data, opts);

  bool ok = grid.size() == 25 && data.size() == 10;
  std::string detail;
  for (const std::vector<int>& truth : {std::vector<int>{13}, std::vector<int>{7, 19}}) {
    MaterialMap t = background;
    for (int l : truth) t.set(l, ConductivityModel::pei());
    const Measurements clean = synth_measurements(mesh, t, data, opts, 0.0, 42);
    for (double noise : {0.0, 0.01}) {
      const auto res = mpm_from_tests(add_noise(clean, noise, 42), tests, grid, Contrast::PEI);
      const auto m = mask_metrics(res, truth);
      ok = ok && m.contains;
      std::snprintf(buf, sizeof buf, "%zu-cell noise %g: %s excess %d; ", truth.size(), noise,
                    m.contains ? "contained" : "MISSED", m.excess);
      detail += buf;
    }
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome determinism() {
  bool ok = true;
  int files = 0;
  std::string mismatch;
  for (const auto& r : kRuns) {
    exit_of(r.tag);
    const int code = run_cli(r, "run2");
    if (code != g_exit.at(r.tag)) {
      ok = false;
      mismatch += r.tag + " (exit) ";
    }
    for (const auto& e : fs::directory_iterator(run1(r.tag))) {
      const auto name = e.path().filename();
      if (name == "metadata.json") continue;
      ++files;
      if (slurp(e.path()) != slurp(g_work / "run2" / r.tag / name)) {
        ok = false;
        mismatch += r.tag + "/" + name.string() + " ";
      }
    }
  }
  std::snprintf(buf, sizeof buf, "%zu runs over 9 subcommands, %d output files compared", kRuns.size(), files);
  return {ok, mismatch.empty() ? std::string(buf) : std::string(buf) + "; differing: " + mismatch};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_work = argv[1];
  fs::create_directories(g_work);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence (annulus)", oracle_equivalence},
      {"brute-force equivalence", brute_force_equivalence},
      {"Gateaux identity", gateaux_identity},
      {"transfer identity (wire)", transfer_identity},
      {"homogeneity", homogeneity},
      {"monotonicity battery", monotonicity_battery},
      {"wire damage signs and ratios", wire_reproduction},
      {"boundary-data continuity", continuity},
      {"MPM containment", mpm_containment},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
