#include "mmrkit/figures.hpp"

#include "mmrkit/breakdown.hpp"
#include "mmrkit/error.hpp"

namespace mmrkit {

namespace {

void require_large_id(const MmrSolution& s) {
  if (s.regime != Regime::LargeId) {
    throw Error(ErrorCode::PreconditionViolated, "figure needs the linear and smooth MMR rules (large_id regime)");
  }
}

}  // namespace

CsvTable fig1a_table(const MmrSolution& s, const GridSpec& grid) {
  require_large_id(s);
  CsvTable t{{"y1", "d_linear", "d_rt"}, {}};
  for (double y : grid.values()) t.rows.push_back({y, evaluate(s.rules[0], y), evaluate(s.rules[1], y)});
  return t;
}

CsvTable fig1b_table(const MmrSolution& s, const GridSpec& grid) {
  require_large_id(s);
  CsvTable t{{"y1", "difference"}, {}};
  for (double y : grid.values()) t.rows.push_back({y, evaluate(s.rules[0], y) - evaluate(s.rules[1], y)});
  return t;
}

CsvTable fig2_table(const StudySet& study, const MmrSolution& s, const GridSpec& grid) {
  require_large_id(s);
  const std::vector<DecisionRule> rules{s.rules[0], s.rules[1], DecisionRule::threshold(0.0),
                                        DecisionRule::coin_flip()};
  const auto gamma = grid.values();
  const auto curves = regret_curve(rules, study, gamma);
  CsvTable t{{"gamma"}, {}};
  for (const auto& c : curves) t.header.push_back(c.rule_label);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    std::vector<double> row{gamma[i]};
    for (const auto& c : curves) row.push_back(c.regret[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable fig3_table(double sigma, const GridSpec& grid) {
  CsvTable t{{"beta_hat", "k_tilde", "k_bar"}, {}};
  for (const auto& r : breakdown_curve(sigma, grid.values())) t.rows.push_back({r.beta_hat, r.k_tilde, r.k_bar});
  return t;
}

CsvTable cost_panels_table(const StudySet& study, const MmrSolution& s, const GridSpec& grid,
                           const std::vector<double>& levels) {
  require_large_id(s);
  const std::vector<DecisionRule> rules{DecisionRule::threshold(0.0), s.rules[1], s.rules[0]};
  const auto gamma = grid.values();
  CsvTable t{{"cost", "c", "gamma", "d_threshold0", "d_rt", "d_linear"}, {}};
  for (int code = 0; code < 3; ++code) {
    for (double c : levels) {
      const CostFunction cost = code == 0   ? CostFunction::constant(c)
                                : code == 1 ? CostFunction::linear(c)
                                            : CostFunction::quadratic(c);
      const auto curves = regret_curve(rules, study, gamma, cost);
      for (std::size_t i = 0; i < gamma.size(); ++i) {
        t.rows.push_back({static_cast<double>(code), c, gamma[i], curves[0].regret[i], curves[1].regret[i],
                          curves[2].regret[i]});
      }
    }
  }
  return t;
}

CsvTable plugin_panels_table(const StudySet& study, const FigureOptions& options) {
  if (study.size() != 2 || study.x().cols() != 1) {
    throw Error(ErrorCode::UnsupportedRule, "plug-in panels need two signals with scalar covariates");
  }
  const double x1 = study.x()(0, 0);
  const double x0 = study.x0()(0);
  const std::vector<double> sigma{study.sigma()(0), study.sigma()(1)};
  const NormalSampler sampler(2, options.qmc);
  const auto gamma = options.plugin_gamma_grid.values();

  CsvTable t{{"x2", "gamma", "d_plugin", "d_plugin_se", "d_linear", "d_rt"}, {}};
  for (double x2 : options.plugin_x2) {
    const StudySet panel({x1, x2}, x0, sigma, study.lipschitz());
    const MmrSolution s = solve(panel);
    require_large_id(s);
    for (double g : gamma) {
      const Estimate p = plugin_profiled_regret(panel, g, sampler, options.plugin_mu2_points);
      t.rows.push_back({x2, g, p.value, p.std_error, profiled_regret(s.rules[0], panel, g),
                        profiled_regret(s.rules[1], panel, g)});
    }
  }
  return t;
}

}  // namespace mmrkit
