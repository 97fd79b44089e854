#include "monodtn/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace monodtn {

std::string to_string(LawKind kind) {
  switch (kind) {
    case LawKind::PowerLaw: return "power";
    case LawKind::Linear: return "linear";
    case LawKind::EJPowerLaw: return "ej";
    case LawKind::PEC: return "pec";
    case LawKind::PEI: return "pei";
    case LawKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

constexpr double kDefaultRegRatio = 1e-6;

}  // namespace

ConductivityModel ConductivityModel::linear(double sigma) {
  require_positive(sigma, "sigma");
  ConductivityModel m;
  m.kind_ = LawKind::Linear;
  m.sigma_bar_ = sigma;
  return m;
}

ConductivityModel ConductivityModel::power_law(double sigma_bar, double e0, double p,
                                               std::optional<double> reg_eps) {
  require_positive(sigma_bar, "sigma_bar");
  require_positive(e0, "E0");
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("growth exponent p must exceed 1");
  ConductivityModel m;
  m.kind_ = LawKind::PowerLaw;
  m.sigma_bar_ = sigma_bar;
  m.e0_ = e0;
  m.p_ = p;
  m.reg_eps_ = reg_eps.value_or(kDefaultRegRatio * e0);
  if (m.reg_eps_ < 0.0) throw std::invalid_argument("reg_eps must be nonnegative");
  return m;
}

ConductivityModel ConductivityModel::ej_power_law(double jc, double e0, double n,
                                                  std::optional<double> reg_eps) {
  require_positive(jc, "Jc");
  require_positive(e0, "E0");
  if (!(n > 1.0) || !std::isfinite(n)) throw std::invalid_argument("E-J exponent n must exceed 1");
  ConductivityModel m;
  m.kind_ = LawKind::EJPowerLaw;
  m.jc_ = jc;
  m.e0_ = e0;
  m.n_ = n;
  m.sigma_bar_ = jc / e0;
  m.p_ = (n + 1.0) / n;
  m.reg_eps_ = reg_eps.value_or(kDefaultRegRatio * e0);
  if (m.reg_eps_ < 0.0) throw std::invalid_argument("reg_eps must be nonnegative");
  return m;
}

ConductivityModel ConductivityModel::pec() {
  ConductivityModel m;
  m.kind_ = LawKind::PEC;
  return m;
}

ConductivityModel ConductivityModel::pei() {
  ConductivityModel m;
  m.kind_ = LawKind::PEI;
  return m;
}

ConductivityModel ConductivityModel::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("tabulated law needs at least two samples");
  if (samples.front().first != 0.0 || samples.front().second != 0.0) {
    throw std::invalid_argument("tabulated law must start at (0, 0)");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].first > samples[i - 1].first)) {
      throw std::invalid_argument("tabulated field samples must be strictly increasing");
    }
  }
  ConductivityModel m;
  m.kind_ = LawKind::Tabulated;
  m.samples_ = std::move(samples);
  m.table_energy_.assign(m.samples_.size(), 0.0);
  for (std::size_t i = 1; i < m.samples_.size(); ++i) {
    const auto [e0, j0] = m.samples_[i - 1];
    const auto [e1, j1] = m.samples_[i];
    m.table_energy_[i] = m.table_energy_[i - 1] + 0.5 * (j0 + j1) * (e1 - e0);
  }
  return m;
}

std::optional<double> ConductivityModel::growth_exponent() const {
  switch (kind_) {
    case LawKind::Linear: return 2.0;
    case LawKind::PowerLaw:
    case LawKind::EJPowerLaw: return p_;
    default: return std::nullopt;
  }
}

ConductivityModel ConductivityModel::with_reg_eps(double eps) const {
  if (eps < 0.0) throw std::invalid_argument("reg_eps must be nonnegative");
  ConductivityModel m = *this;
  if (kind_ == LawKind::PowerLaw || kind_ == LawKind::EJPowerLaw) m.reg_eps_ = eps;
  return m;
}

ConductivityModel ConductivityModel::scaled(double factor) const {
  require_positive(factor, "scale factor");
  ConductivityModel m = *this;
  switch (kind_) {
    case LawKind::Linear:
    case LawKind::PowerLaw: m.sigma_bar_ *= factor; break;
    case LawKind::EJPowerLaw:
      m.jc_ *= factor;
      m.sigma_bar_ = m.jc_ / m.e0_;
      break;
    case LawKind::Tabulated:
      for (auto& s : m.samples_) s.second *= factor;
      for (auto& q : m.table_energy_) q *= factor;
      break;
    case LawKind::PEC:
    case LawKind::PEI: break;
  }
  return m;
}

void ConductivityModel::require_pointwise() const {
  if (is_structural()) {
    throw std::logic_error(to_string(kind_) + " law has no pointwise conductivity");
  }
}

double ConductivityModel::raw_sigma(double e) const {
  switch (kind_) {
    case LawKind::Linear: return sigma_bar_;
    case LawKind::PowerLaw: return sigma_bar_ * std::pow(e / e0_, p_ - 2.0);
    case LawKind::EJPowerLaw: return jc_ / e0_ * std::pow(e / e0_, (1.0 - n_) / n_);
    default: return 0.0;
  }
}

double ConductivityModel::raw_energy(double e) const {
  switch (kind_) {
    case LawKind::Linear: return 0.5 * sigma_bar_ * e * e;
    case LawKind::PowerLaw: return sigma_bar_ * e0_ * e0_ * std::pow(e / e0_, p_) / p_;
    case LawKind::EJPowerLaw:
      return jc_ * e0_ * (n_ / (n_ + 1.0)) * std::pow(e / e0_, (n_ + 1.0) / n_);
    default: return 0.0;
  }
}

double ConductivityModel::table_flux(double e, double* slope) const {
  auto it = std::upper_bound(samples_.begin(), samples_.end(), e,
                             [](double v, const auto& s) { return v < s.first; });
  std::size_t hi = static_cast<std::size_t>(it - samples_.begin());
  hi = std::clamp<std::size_t>(hi, 1, samples_.size() - 1);
  const auto [e0, j0] = samples_[hi - 1];
  const auto [e1, j1] = samples_[hi];
  const double s = (j1 - j0) / (e1 - e0);
  if (slope) *slope = s;
  return j0 + s * (e - e0);
}

double ConductivityModel::sigma(double e) const {
  require_pointwise();
  if (kind_ == LawKind::Tabulated) {
    double slope = 0.0;
    const double j = table_flux(e, &slope);
    return e > 0.0 ? j / e : slope;
  }
  if (kind_ != LawKind::Linear && e < reg_eps_) return raw_sigma(reg_eps_);
  return raw_sigma(e);
}

double ConductivityModel::flux(double e) const {
  require_pointwise();
  switch (kind_) {
    case LawKind::Linear: return sigma_bar_ * e;
    case LawKind::Tabulated: return table_flux(e, nullptr);
    case LawKind::PowerLaw:
      if (e < reg_eps_) return raw_sigma(reg_eps_) * e;
      return sigma_bar_ * e0_ * std::pow(e / e0_, p_ - 1.0);
    case LawKind::EJPowerLaw:
      if (e < reg_eps_) return raw_sigma(reg_eps_) * e;
      return jc_ * std::pow(e / e0_, 1.0 / n_);
    default: return 0.0;
  }
}

double ConductivityModel::dflux(double e) const {
  require_pointwise();
  switch (kind_) {
    case LawKind::Linear: return sigma_bar_;
    case LawKind::Tabulated: {
      double slope = 0.0;
      table_flux(e, &slope);
      return slope;
    }
    case LawKind::PowerLaw:
    case LawKind::EJPowerLaw:
      if (e < reg_eps_) return raw_sigma(reg_eps_);
      return (p_ - 1.0) * raw_sigma(e);
    default: return 0.0;
  }
}

double ConductivityModel::energy_density(double e) const {
  require_pointwise();
  switch (kind_) {
    case LawKind::Linear: return raw_energy(e);
    case LawKind::Tabulated: {
      auto it = std::upper_bound(samples_.begin(), samples_.end(), e,
                                 [](double v, const auto& s) { return v < s.first; });
      std::size_t hi = static_cast<std::size_t>(it - samples_.begin());
      hi = std::clamp<std::size_t>(hi, 1, samples_.size() - 1);
      const double e_lo = samples_[hi - 1].first;
      const double j_lo = samples_[hi - 1].second;
      const double j = table_flux(e, nullptr);
      return table_energy_[hi - 1] + 0.5 * (j_lo + j) * (e - e_lo);
    }
    case LawKind::PowerLaw:
    case LawKind::EJPowerLaw: {
      if (reg_eps_ <= 0.0) return raw_energy(e);
      const double s_eps = raw_sigma(reg_eps_);
      if (e < reg_eps_) return 0.5 * s_eps * e * e;
      return 0.5 * s_eps * reg_eps_ * reg_eps_ + (raw_energy(e) - raw_energy(reg_eps_));
    }
    default: return 0.0;
  }
}

bool ConductivityModel::has_monotone_flux() const {
  if (kind_ != LawKind::Tabulated) return true;
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].second > samples_[i - 1].second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

const ConductivityModel& MaterialMap::at(int label) const {
  auto it = regions_.find(label);
  if (it == regions_.end()) {
    throw std::invalid_argument("no material for region " + std::to_string(label));
  }
  return it->second;
}

void MaterialMap::set(int label, ConductivityModel model) {
  regions_.insert_or_assign(label, std::move(model));
}

MaterialMap MaterialMap::with(int label, ConductivityModel model) const {
  MaterialMap copy = *this;
  copy.set(label, std::move(model));
  return copy;
}

void MaterialMap::check(std::span<const int> mesh_labels) const {
  if (!contains(0)) throw std::invalid_argument("material map has no background region 0");
  if (at(0).is_structural()) {
    throw std::invalid_argument("background region 0 cannot be " + to_string(at(0).kind()));
  }
  for (int label : mesh_labels) {
    if (!contains(label)) {
      throw std::invalid_argument("no material for mesh region " + std::to_string(label));
    }
  }
  for (const auto& [label, model] : regions_) {
    if (!model.has_monotone_flux()) {
      throw std::invalid_argument("region " + std::to_string(label) +
                                  " has a non-monotone tabulated flux");
    }
  }
}

std::optional<double> MaterialMap::outer_exponent() const {
  if (!contains(0)) return std::nullopt;
  return at(0).growth_exponent();
}

std::optional<double> MaterialMap::inner_exponent() const {
  std::optional<double> q;
  for (const auto& [label, model] : regions_) {
    if (label == 0 || model.is_structural()) continue;
    const auto e = model.growth_exponent();
    if (!e) return std::nullopt;
    if (q && *q != *e) return std::nullopt;
    q = e;
  }
  return q;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const nlohmann::json& doc, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : doc.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw std::invalid_argument("unknown key \"" + key + "\" in " + where);
    }
  }
}

double number(const nlohmann::json& doc, const char* key, const std::string& where) {
  if (!doc.contains(key) || !doc[key].is_number()) {
    throw std::invalid_argument("missing numeric \"" + std::string(key) + "\" in " + where);
  }
  return doc[key].get<double>();
}

std::optional<double> optional_number(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) return std::nullopt;
  return doc[key].get<double>();
}

}  // namespace

ConductivityModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    throw std::invalid_argument("material entry needs a string \"type\"");
  }
  const std::string type = doc["type"].get<std::string>();
  const std::string where = "material of type \"" + type + "\"";
  if (type == "linear") {
    reject_unknown(doc, {"type", "sigma"}, where);
    return ConductivityModel::linear(number(doc, "sigma", where));
  }
  if (type == "power") {
    reject_unknown(doc, {"type", "sigma_bar", "E0", "p", "reg_eps"}, where);
    return ConductivityModel::power_law(number(doc, "sigma_bar", where), number(doc, "E0", where),
                                        number(doc, "p", where), optional_number(doc, "reg_eps"));
  }
  if (type == "ej") {
    reject_unknown(doc, {"type", "Jc", "E0", "n", "reg_eps"}, where);
    return ConductivityModel::ej_power_law(number(doc, "Jc", where), number(doc, "E0", where),
                                           number(doc, "n", where), optional_number(doc, "reg_eps"));
  }
  if (type == "pec") {
    reject_unknown(doc, {"type"}, where);
    return ConductivityModel::pec();
  }
  if (type == "pei") {
    reject_unknown(doc, {"type"}, where);
    return ConductivityModel::pei();
  }
  if (type == "tabulated") {
    reject_unknown(doc, {"type", "samples"}, where);
    std::vector<std::pair<double, double>> samples;
    for (const auto& s : doc.at("samples")) samples.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
    return ConductivityModel::tabulated(std::move(samples));
  }
  throw std::invalid_argument("unknown material type \"" + type + "\"");
}

nlohmann::json model_to_json(const ConductivityModel& m) {
  nlohmann::json j;
  j["type"] = to_string(m.kind());
  switch (m.kind()) {
    case LawKind::Linear: j["sigma"] = m.sigma_bar(); break;
    case LawKind::PowerLaw:
      j["sigma_bar"] = m.sigma_bar();
      j["E0"] = m.e0();
      j["p"] = *m.growth_exponent();
      j["reg_eps"] = m.reg_eps();
      break;
    case LawKind::EJPowerLaw:
      j["Jc"] = m.jc();
      j["E0"] = m.e0();
      j["n"] = m.n_value();
      j["reg_eps"] = m.reg_eps();
      break;
    case LawKind::Tabulated: {
      auto& arr = j["samples"] = nlohmann::json::array();
      for (const auto& [e, f] : m.samples()) arr.push_back({e, f});
      break;
    }
    default: break;
  }
  return j;
}

MaterialMap materials_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("regions") || !doc["regions"].is_object()) {
    throw std::invalid_argument("material config needs an object \"regions\"");
  }
  reject_unknown(doc, {"regions"}, "material config");
  MaterialMap map;
  for (const auto& [key, value] : doc["regions"].items()) {
    std::size_t pos = 0;
    int label = -1;
    try {
      label = std::stoi(key, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != key.size() || label < 0) {
      throw std::invalid_argument("region key \"" + key + "\" is not a nonnegative integer");
    }
    map.set(label, model_from_json(value));
  }
  return map;
}

nlohmann::json materials_to_json(const MaterialMap& materials) {
  nlohmann::json doc;
  auto& regions = doc["regions"] = nlohmann::json::object();
  for (const auto& [label, model] : materials.regions()) regions[std::to_string(label)] = model_to_json(model);
  return doc;
}

// ---------------------------------------------------------------------------

BoundCheck check_growth_bounds(const ConductivityModel& model, double p, double sigma_lo,
                               double sigma_hi, double e0, std::span<const double> e_grid) {
  BoundCheck out;
  constexpr double slack = 1e-12;
  for (double e : e_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("growth bound grid must be positive");
    const double s = model.sigma(e);
    const double r = std::pow(e / e0, p - 2.0);
    const double lower = sigma_lo * r;
    const double upper = p >= 2.0 ? sigma_hi * (1.0 + r) : sigma_hi * r;
    if (s < lower * (1.0 - slack)) {
      out = {false, e, "lower growth bound fails at E=" + std::to_string(e)};
      return out;
    }
    if (s > upper * (1.0 + slack)) {
      out = {false, e, "upper growth bound fails at E=" + std::to_string(e)};
      return out;
    }
  }
  return out;
}

MonotonicityCheck check_strong_monotonicity(const ConductivityModel& model, double p, double kappa,
                                            std::span<const std::pair<Vec2, Vec2>> pairs) {
  auto current = [&model](Vec2 e) {
    const double mag = std::hypot(e.x, e.y);
    if (mag == 0.0) return Vec2{0.0, 0.0};
    const double s = model.flux(mag) / mag;
    return Vec2{s * e.x, s * e.y};
  };
  MonotonicityCheck out;
  out.best_kappa = std::numeric_limits<double>::infinity();
  for (const auto& [e1, e2] : pairs) {
    const Vec2 j1 = current(e1), j2 = current(e2);
    const Vec2 d{e2.x - e1.x, e2.y - e1.y};
    const double dn = std::hypot(d.x, d.y);
    if (dn == 0.0) continue;
    const double lhs = (j2.x - j1.x) * d.x + (j2.y - j1.y) * d.y;
    double base = 0.0;
    if (p >= 2.0) {
      base = std::pow(dn, p);
    } else {
      const double m2 = 1.0 + e1.x * e1.x + e1.y * e1.y + e2.x * e2.x + e2.y * e2.y;
      base = std::pow(m2, 0.5 * (p - 2.0)) * dn * dn;
    }
    const double ratio = lhs / base;
    out.best_kappa = std::min(out.best_kappa, ratio);
    if (out.passed && lhs < kappa * base * (1.0 - 1e-12)) {
      out.passed = false;
      out.witness = std::make_pair(e1, e2);
    }
  }
  return out;
}

}  // namespace monodtn
