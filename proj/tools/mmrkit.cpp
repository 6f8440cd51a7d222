// mmrkit command-line front end. Exit codes: 0 ok, 2 invalid config or
// flags, 3 solver failure.

#include <CLI11.hpp>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "mmrkit/breakdown.hpp"
#include "mmrkit/error.hpp"
#include "mmrkit/figures.hpp"
#include "mmrkit/io.hpp"
#include "mmrkit/late.hpp"
#include "mmrkit/mmr.hpp"
#include "mmrkit/regret.hpp"

namespace fs = std::filesystem;
using namespace mmrkit;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> lipschitz;
  std::optional<double> alpha, mu1, mu2;
  std::optional<double> sigma, beta_hat;
  std::optional<double> gamma_lo, gamma_hi;
  std::optional<std::size_t> gamma_n;
};

int guarded(int code, const char* what, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "mmrkit: " << what << ": " << e.what() << '\n';
    return code;
  }
}

Json load_config(const Options& o) {
  Json cfg = read_json_file(o.config);
  if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
  if (o.lipschitz) cfg["study"]["C"] = *o.lipschitz;
  if (o.alpha) cfg["late"]["alpha"] = *o.alpha;
  if (o.mu1) cfg["late"]["mu1"] = *o.mu1;
  if (o.mu2) cfg["late"]["mu2"] = *o.mu2;
  if (o.sigma) cfg["breakdown"]["sigma"] = *o.sigma;
  if (o.beta_hat) cfg["breakdown"]["beta_hat"] = *o.beta_hat;
  if (o.seed) cfg["seed"] = *o.seed;
  return cfg;
}

Json section(const Json& cfg, const char* key) { return cfg.contains(key) ? cfg.at(key) : Json::object(); }

double field(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("field \"") + key + "\" must be a number");
  return j.at(key).get<double>();
}

double required_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  return field(j, key, 0.0);
}

GridSpec gamma_grid(const Json& j, const Options& o, const GridSpec& fallback) {
  Json g = j.is_null() ? Json::object() : j;
  if (o.gamma_lo) g["lo"] = *o.gamma_lo;
  if (o.gamma_hi) g["hi"] = *o.gamma_hi;
  if (o.gamma_n) g["n"] = *o.gamma_n;
  return grid_from_json(g, fallback);
}

std::uint64_t seed_of(const Json& cfg) {
  if (!cfg.contains("seed")) return 0;
  if (!cfg.at("seed").is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
  return cfg.at("seed").get<std::uint64_t>();
}

void emit_json(const Json& j, const fs::path& file) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  write_text(file, text);
}

int cmd_solve(const Options& o) {
  std::optional<StudySet> study;
  if (int rc = guarded(kExitConfig, "invalid config", [&] {
        study = study_from_json(section(load_config(o), "study"));
      })) {
    return rc;
  }
  return guarded(kExitSolver, "solver failure", [&] {
    Json out = solution_to_json(solve(*study));
    const MaximinSolution mm = maximin(*study);
    out["maximin"] = {{"rule", rule_to_json(mm.rule)}, {"value", mm.value}};
    Json order = Json::array();
    for (std::size_t i = 0; i < study->size(); ++i) order.push_back(study->original_index(i));
    out["study_order"] = order;
    emit_json(out, fs::path(o.out) / "solve.json");
  });
}

int cmd_figures(const Options& o) {
  std::optional<StudySet> study;
  FigureOptions f;
  if (int rc = guarded(kExitConfig, "invalid config", [&] {
        const Json cfg = load_config(o);
        study = study_from_json(section(cfg, "study"));
        const Json fj = section(cfg, "figures");
        f.rule_grid = grid_from_json(section(fj, "rule_grid"), f.rule_grid);
        f.gamma_grid = gamma_grid(section(fj, "gamma_grid"), o, f.gamma_grid);
        f.beta_grid = grid_from_json(section(fj, "beta_grid"), f.beta_grid);
        f.breakdown_sigma = field(fj, "breakdown_sigma", f.breakdown_sigma);
        if (fj.contains("cost_levels")) f.cost_levels = fj.at("cost_levels").get<std::vector<double>>();
        const Json pj = section(fj, "plugin");
        f.plugin_gamma_grid = grid_from_json(section(pj, "gamma_grid"), f.plugin_gamma_grid);
        f.plugin_mu2_points = static_cast<int>(field(pj, "mu2_points", f.plugin_mu2_points));
        if (pj.contains("x2")) f.plugin_x2 = pj.at("x2").get<std::vector<double>>();
        f.qmc.points = static_cast<std::size_t>(field(pj, "points", static_cast<double>(f.qmc.points)));
        f.qmc.replicates = static_cast<std::size_t>(field(pj, "replicates", static_cast<double>(f.qmc.replicates)));
        f.qmc.seed = seed_of(cfg);
      })) {
    return rc;
  }
  return guarded(kExitSolver, "solver failure", [&] {
    const fs::path dir(o.out);
    const MmrSolution s = solve(*study);
    write_text(dir / "fig1a.csv", to_csv(fig1a_table(s, f.rule_grid)));
    write_text(dir / "fig1b.csv", to_csv(fig1b_table(s, f.rule_grid)));
    write_text(dir / "fig2.csv", to_csv(fig2_table(*study, s, f.gamma_grid)));
    write_text(dir / "fig3.csv", to_csv(fig3_table(f.breakdown_sigma, f.beta_grid)));
    write_text(dir / "cost_panels.csv", to_csv(cost_panels_table(*study, s, f.gamma_grid, f.cost_levels)));
    write_text(dir / "plugin_panels.csv", to_csv(plugin_panels_table(*study, f)));
    const Json meta{{"seed", f.qmc.seed},
                    {"qmc_points", f.qmc.points},
                    {"qmc_replicates", f.qmc.replicates},
                    {"plugin_x2", f.plugin_x2},
                    {"plugin_mu2_points", f.plugin_mu2_points},
                    {"cost_codes", {{"0", "constant"}, {"1", "linear"}, {"2", "quadratic"}}},
                    {"solution", solution_to_json(s)}};
    write_text(dir / "figures_meta.json", meta.dump(2) + "\n");
  });
}

int cmd_breakdown(const Options& o) {
  Json bj;
  double sigma = 1.0;
  GridSpec grid{0.1, 5.0, 50};
  std::optional<OvbInputs> ovb;
  if (int rc = guarded(kExitConfig, "invalid config", [&] {
        bj = section(load_config(o), "breakdown");
        sigma = field(bj, "sigma", sigma);
        grid = grid_from_json(section(bj, "beta_grid"), grid);
        if (bj.contains("ovb")) {
          const Json& v = bj.at("ovb");
          ovb = OvbInputs{required_field(v, "var_y_perp"), required_field(v, "var_d_perp"),
                          required_field(v, "r2_dx"), required_field(v, "rbar_d"), sigma};
          ovb->validate();
        }
        if (ovb && !bj.contains("beta_hat")) throw ConfigError("\"ovb\" needs \"beta_hat\"");
        if (!(sigma > 0.0)) throw ConfigError("breakdown sigma must be positive");
      })) {
    return rc;
  }
  return guarded(kExitSolver, "solver failure", [&] {
    CsvTable t = fig3_table(sigma, grid);
    write_text(fs::path(o.out) / "breakdown.csv", to_csv(t));
    Json out{{"sigma", sigma}, {"rows", t.rows.size()}};
    if (bj.contains("beta_hat")) {
      const double b = field(bj, "beta_hat", 0.0);
      const SignedBreakdown kb = decision_breakdown_signed(b, sigma);
      out["beta_hat"] = b;
      out["k_bar"] = kb.k_bar;
      out["symmetric_extension"] = kb.symmetric_extension;
      out["k_tilde"] = b > 0.0 ? Json(naive_breakdown(b)) : Json(nullptr);
      if (ovb) {
        const double k = dsb_k(*ovb);
        out["dsb_k"] = std::isfinite(k) ? Json(k) : Json("inf");
        if (std::isfinite(k)) {
          const DecisionRule rule = ovb_rule(k, sigma);
          out["rule"] = rule_to_json(rule);
          out["action"] = evaluate(rule, b);
        }
      }
    }
    emit_json(out, fs::path(o.out) / "breakdown.json");
  });
}

int cmd_late(const Options& o) {
  LateInputs in{};
  if (int rc = guarded(kExitConfig, "invalid config", [&] {
        const Json lj = section(load_config(o), "late");
        in = {required_field(lj, "alpha"), required_field(lj, "mu1"), required_field(lj, "mu2")};
      })) {
    return rc;
  }
  return guarded(kExitSolver, "solver failure", [&] {
    const WelfareBounds b = late_bounds(in);
    const Json out{{"alpha", in.alpha}, {"mu1", in.mu1},       {"mu2", in.mu2},
                   {"lower", b.lower},  {"upper", b.upper},   {"nontrivial", late_nontrivial(in)}};
    emit_json(out, fs::path(o.out) / "late.json");
  });
}

int cmd_regret_curve(const Options& o) {
  std::optional<StudySet> study;
  std::vector<DecisionRule> rules;
  GridSpec grid{-30.0, 30.0, 601};
  std::optional<CostFunction> cost;
  if (int rc = guarded(kExitConfig, "invalid config", [&] {
        const Json cfg = load_config(o);
        study = study_from_json(section(cfg, "study"));
        const Json rj = section(cfg, "regret_curve");
        if (!rj.contains("rules") || !rj.at("rules").is_array() || rj.at("rules").empty()) {
          throw ConfigError("regret_curve.rules must be a nonempty array");
        }
        for (const auto& r : rj.at("rules")) rules.push_back(rule_from_json(r, *study));
        grid = gamma_grid(section(rj, "gamma_grid"), o, grid);
        if (rj.contains("cost")) cost = cost_from_json(rj.at("cost"));
      })) {
    return rc;
  }
  return guarded(kExitSolver, "solver failure", [&] {
    const auto gamma = grid.values();
    const auto curves = regret_curve(rules, *study, gamma, cost);
    CsvTable t{{"gamma"}, {}};
    std::map<std::string, int> seen;
    for (const auto& c : curves) {
      const int n = ++seen[c.rule_label];
      t.header.push_back(n == 1 ? c.rule_label : c.rule_label + "_" + std::to_string(n));
    }
    for (std::size_t i = 0; i < gamma.size(); ++i) {
      std::vector<double> row{gamma[i]};
      for (const auto& c : curves) row.push_back(c.regret[i]);
      t.rows.push_back(std::move(row));
    }
    write_text(fs::path(o.out) / "regret_curve.csv", to_csv(t));
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmrkit: minimax-regret treatment choice under partial identification"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "seed for the quasi-Monte-Carlo shifts");
  };
  const auto study_flags = [&](CLI::App* sub) { sub->add_option("--C", o.lipschitz, "Lipschitz constant"); };
  const auto gamma_flags = [&](CLI::App* sub) {
    sub->add_option("--gamma-lo", o.gamma_lo, "lower end of the gamma grid");
    sub->add_option("--gamma-hi", o.gamma_hi, "upper end of the gamma grid");
    sub->add_option("--gamma-n", o.gamma_n, "number of gamma grid points");
  };

  std::map<CLI::App*, std::function<int(const Options&)>> handlers;
  CLI::App* solve_cmd = app.add_subcommand("solve", "classify the study and solve for the MMR rules");
  common(solve_cmd);
  study_flags(solve_cmd);
  handlers[solve_cmd] = cmd_solve;

  CLI::App* fig_cmd = app.add_subcommand("figures", "write the figure CSV tables");
  common(fig_cmd);
  study_flags(fig_cmd);
  gamma_flags(fig_cmd);
  handlers[fig_cmd] = cmd_figures;

  CLI::App* bd_cmd = app.add_subcommand("breakdown", "breakdown points for a scalar estimate");
  common(bd_cmd);
  bd_cmd->add_option("--sigma", o.sigma, "standard error of the estimate");
  bd_cmd->add_option("--beta-hat", o.beta_hat, "point estimate");
  handlers[bd_cmd] = cmd_breakdown;

  CLI::App* late_cmd = app.add_subcommand("late", "identified set for the policy-relevant effect contrast");
  common(late_cmd);
  late_cmd->add_option("--alpha", o.alpha, "propensity shift");
  late_cmd->add_option("--mu1", o.mu1, "reduced-form coefficient");
  late_cmd->add_option("--mu2", o.mu2, "first-stage coefficient");
  handlers[late_cmd] = cmd_late;

  CLI::App* rc_cmd = app.add_subcommand("regret-curve", "profiled regret curves for listed rules");
  common(rc_cmd);
  study_flags(rc_cmd);
  gamma_flags(rc_cmd);
  handlers[rc_cmd] = cmd_regret_curve;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  for (auto& [sub, handler] : handlers) {
    if (sub->parsed()) return handler(o);
  }
  return kExitConfig;
}
