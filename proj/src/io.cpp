#include "mmrkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mmrkit/error.hpp"
#include "mmrkit/numerics.hpp"

namespace mmrkit {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string("field \"") + what + "\" must be a number");
  return j.get<double>();
}

std::vector<double> number_list(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string("field \"") + what + "\" must be a nonempty array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_list(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double param(const Json& params, const char* key) { return number(require(params, key), key); }

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

StudySet study_from_json(const Json& j) {
  const Json& xs = require(j, "x");
  const std::vector<double> sigma = number_list(require(j, "sigma"), "sigma");
  const double c = number(require(j, "C"), "C");
  const Json& x0 = require(j, "x0");
  if (!xs.is_array() || xs.empty()) throw ConfigError("field \"x\" must be a nonempty array");

  if (x0.is_number()) {
    return StudySet(number_list(xs, "x"), x0.get<double>(), sigma, c);
  }
  const std::vector<double> origin = number_list(x0, "x0");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(origin.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::vector<double> row = number_list(xs[i], "x");
    if (row.size() != origin.size()) throw ConfigError("every row of \"x\" must match the length of \"x0\"");
    for (std::size_t d = 0; d < row.size(); ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = row[d];
  }
  return StudySet(x, to_vector(origin), to_vector(sigma), c);
}

DecisionRule rule_from_json(const Json& j, const StudySet& study) {
  const Json& kind_field = require(j, "kind");
  if (!kind_field.is_string()) throw ConfigError("rule \"kind\" must be a string");
  const std::string kind = kind_field.get<std::string>();
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  if (!params.is_object()) throw ConfigError("rule \"params\" must be an object");

  if (kind == "threshold") {
    const double c = params.contains("c") ? param(params, "c") : 0.0;
    Eigen::VectorXd w;
    if (params.contains("w")) w = to_vector(number_list(params.at("w"), "w"));
    return DecisionRule::threshold(c, w);
  }
  if (kind == "linear") return DecisionRule::linear(param(params, "rho"));
  if (kind == "rt_smooth") return DecisionRule::rt_smooth(param(params, "sigma_tilde"));
  if (kind == "coin_flip") return DecisionRule::coin_flip();
  if (kind == "no_data") return DecisionRule::no_data();
  if (kind == "plug_in") return DecisionRule::plug_in(study);
  if (kind == "mixture") {
    const std::vector<double> weights = number_list(require(params, "weights"), "weights");
    const Json& comps = require(params, "components");
    if (!comps.is_array()) throw ConfigError("mixture \"components\" must be an array");
    std::vector<DecisionRule> rules;
    for (const auto& c : comps) rules.push_back(rule_from_json(c, study));
    return DecisionRule::mixture(weights, std::move(rules));
  }
  throw ConfigError("unknown rule kind \"" + kind + "\"");
}

Json rule_to_json(const DecisionRule& rule) {
  if (const auto* t = rule.as<Threshold>()) {
    Json params{{"c", t->c}};
    if (t->w.size() > 0) params["w"] = to_list(t->w);
    return {{"kind", "threshold"}, {"params", params}};
  }
  if (const auto* l = rule.as<Linear>()) return {{"kind", "linear"}, {"params", {{"rho", l->rho}}}};
  if (const auto* r = rule.as<RtSmooth>()) {
    return {{"kind", "rt_smooth"}, {"params", {{"sigma_tilde", r->sigma_tilde}}}};
  }
  if (rule.as<CoinFlip>()) return {{"kind", "coin_flip"}, {"params", Json::object()}};
  if (rule.as<NoData>()) return {{"kind", "no_data"}, {"params", Json::object()}};
  if (const auto* m = rule.as<Mixture>()) {
    Json comps = Json::array();
    for (const auto& c : m->components) comps.push_back(rule_to_json(c));
    return {{"kind", "mixture"}, {"params", {{"weights", m->weights}, {"components", comps}}}};
  }
  return {{"kind", "plug_in"}, {"params", Json::object()}};
}

CostFunction cost_from_json(const Json& j) {
  const Json& kind_field = require(j, "kind");
  if (!kind_field.is_string()) throw ConfigError("cost \"kind\" must be a string");
  const std::string kind = kind_field.get<std::string>();
  const double c = number(require(j, "c"), "c");
  if (kind == "constant") return CostFunction::constant(c);
  if (kind == "linear") return CostFunction::linear(c);
  if (kind == "quadratic") return CostFunction::quadratic(c);
  throw ConfigError("unknown cost kind \"" + kind + "\"");
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::PointLike:
      return "point_like";
    case Regime::Boundary:
      return "boundary";
    case Regime::LargeId:
      return "large_id";
  }
  return "unknown";
}

Json solution_to_json(const MmrSolution& s) {
  Json out{{"regime", regime_name(s.regime)}, {"k", s.k}, {"mmr_value", s.mmr_value}};
  out["rho_star"] = s.rho_star ? Json(*s.rho_star) : Json(nullptr);
  out["sigma_tilde"] = s.sigma_tilde ? Json(*s.sigma_tilde) : Json(nullptr);
  out["m0_star"] = s.m0_star ? Json(*s.m0_star) : Json(nullptr);
  out["weights"] = s.weights ? Json(to_list(*s.weights)) : Json(nullptr);
  Json rules = Json::array();
  for (const auto& r : s.rules) rules.push_back(rule_to_json(r));
  out["rules"] = rules;
  return out;
}

std::vector<double> GridSpec::values() const { return linspace(lo, hi, n); }

GridSpec grid_from_json(const Json& j, const GridSpec& fallback) {
  GridSpec g = fallback;
  if (!j.is_null()) {
    if (!j.is_object()) throw ConfigError("grid must be an object with lo, hi, n");
    if (j.contains("lo")) g.lo = number(j.at("lo"), "lo");
    if (j.contains("hi")) g.hi = number(j.at("hi"), "hi");
    if (j.contains("n")) {
      if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 2) {
        throw ConfigError("grid n must be an integer >= 2");
      }
      g.n = j.at("n").get<std::size_t>();
    }
  }
  if (!(g.lo < g.hi) || !std::isfinite(g.lo) || !std::isfinite(g.hi)) throw ConfigError("grid needs lo < hi");
  if (g.n < 2) throw ConfigError("grid n must be >= 2");
  return g;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw Error(ErrorCode::DimensionMismatch, "CSV row length differs from the header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace mmrkit
