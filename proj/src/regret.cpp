#include "mmrkit/regret.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/random/sobol.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "mmrkit/error.hpp"
#include "mmrkit/mmr.hpp"
#include "mmrkit/numerics.hpp"
#include "mmrkit/parallel.hpp"

namespace mmrkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDominanceTol = 1e-9;

CostFunction make_cost(CostFunction::Kind kind, double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "cost scale must be finite and >= 0");
  return {kind, c};
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

CostFunction CostFunction::linear(double c) { return make_cost(Kind::Linear, c); }
CostFunction CostFunction::quadratic(double c) { return make_cost(Kind::Quadratic, c); }
CostFunction CostFunction::constant(double c) { return make_cost(Kind::Constant, c); }

double CostFunction::operator()(double a) const {
  if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorCode::InvalidArgument, "cost argument must lie in [0, 1]");
  switch (kind) {
    case Kind::Linear:
      return c * std::min(a, 1.0 - a);
    case Kind::Quadratic:
      return c * a * (1.0 - a);
    case Kind::Constant:
      return (a > 0.0 && a < 1.0) ? c : 0.0;
  }
  return 0.0;
}

std::string to_string(CostFunction::Kind kind) {
  switch (kind) {
    case CostFunction::Kind::Linear:
      return "linear";
    case CostFunction::Kind::Quadratic:
      return "quadratic";
    case CostFunction::Kind::Constant:
      return "constant";
  }
  return "unknown";
}

NormalSampler::NormalSampler(std::size_t dimension, const QmcOptions& options) {
  if (dimension == 0 || options.replicates < 2 || options.points < options.replicates) {
    throw Error(ErrorCode::InvalidArgument, "sampler needs dimension >= 1, replicates >= 2, points >= replicates");
  }
  const std::size_t per = options.points / options.replicates;
  const auto dim = static_cast<Eigen::Index>(dimension);
  Eigen::MatrixXd base(static_cast<Eigen::Index>(per), dim);
  boost::random::sobol sobol(dimension);
  for (Eigen::Index i = 0; i < base.rows(); ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) base(i, j) = unit_uniform(sobol());
  }

  std::mt19937_64 rng(options.seed);
  const boost::math::normal normal;
  constexpr double edge = 0x1.0p-53;
  draws_.reserve(options.replicates);
  for (std::size_t r = 0; r < options.replicates; ++r) {
    Eigen::VectorXd shift(dim);
    for (Eigen::Index j = 0; j < dim; ++j) shift(j) = unit_uniform(rng());
    Eigen::MatrixXd z(base.rows(), dim);
    for (Eigen::Index i = 0; i < base.rows(); ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        double u = base(i, j) + shift(j);
        if (u >= 1.0) u -= 1.0;
        z(i, j) = boost::math::quantile(normal, std::clamp(u, edge, 1.0 - edge));
      }
    }
    draws_.push_back(std::move(z));
  }
}

namespace {

Estimate sampled_plugin_action(const StudySet& study, const Eigen::VectorXd& mu, const NormalSampler& sampler) {
  const Eigen::VectorXd& sigma = study.sigma();
  const std::size_t reps = sampler.replicates();
  std::vector<double> means(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const Eigen::MatrixXd& z = sampler.replicate(r);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const Eigen::VectorXd y = mu + sigma.cwiseProduct(z.row(i).transpose());
      sum += plug_in_action(study, y).action;
    }
    means[r] = sum / static_cast<double>(z.rows());
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(reps);
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double se = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  return {mean, se};
}

double index_sd(const Eigen::VectorXd& w, const StudySet& study) {
  return std::sqrt(w.array().square().matrix().dot(study.variance()));
}

}  // namespace

Estimate expected_action(const DecisionRule& rule, const StudySet& study, const Eigen::VectorXd& mu,
                         const QmcOptions& qmc) {
  if (static_cast<std::size_t>(mu.size()) != study.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mu length differs from the study");
  }
  if (!mu.allFinite()) throw Error(ErrorCode::NonFiniteInput, "mu must be finite");
  if (const auto* p = rule.as<PlugIn>()) {
    return sampled_plugin_action(p->study, mu, NormalSampler(study.size(), qmc));
  }
  if (const auto* m = rule.as<Mixture>()) {
    Estimate out{0.0, 0.0};
    double var = 0.0;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      const Estimate e = expected_action(m->components[i], study, mu, qmc);
      out.value += m->weights[i] * e.value;
      var += m->weights[i] * m->weights[i] * e.std_error * e.std_error;
    }
    out.std_error = std::sqrt(var);
    return out;
  }
  const Eigen::VectorXd w = index_weights(rule, study.size());
  return {adoption_probability(rule, w.dot(mu), index_sd(w, study)), 0.0};
}

double expected_regret(const DecisionRule& rule, const StudySet& study, const Eigen::VectorXd& mu, double u0,
                       const QmcOptions& qmc) {
  if (!std::isfinite(u0)) throw Error(ErrorCode::NonFiniteInput, "welfare contrast must be finite");
  const WelfareBounds b = welfare_bounds(study, mu);
  const double slack = 1e-12 * (1.0 + std::abs(u0));
  if (u0 < b.lower - slack || u0 > b.upper + slack) {
    throw Error(ErrorCode::InfeasibleState, "welfare contrast lies outside the identified set at mu");
  }
  if (u0 == 0.0) return 0.0;
  const double e = expected_action(rule, study, mu, qmc).value;
  return u0 * ((u0 >= 0.0 ? 1.0 : 0.0) - e);
}

double profiled_regret_from_adoption(double gamma, double k, double adoption) {
  if (gamma < -k) return (k - gamma) * adoption;
  if (gamma > k) return (gamma + k) * (1.0 - adoption);
  return std::max((gamma + k) * (1.0 - adoption), (k - gamma) * adoption);
}

double profiled_regret(const DecisionRule& rule, const StudySet& study, double gamma) {
  if (!uses_nearest_neighbor_index(rule)) {
    throw Error(ErrorCode::UnsupportedRule, "profiled regret needs a rule on the nearest-neighbor signal");
  }
  const double e = adoption_probability(rule, gamma, study.sigma()(0));
  return profiled_regret_from_adoption(gamma, study.k(), e);
}

WorstCase worst_case_regret(const DecisionRule& rule, const StudySet& study, const GammaRange& range, int grid_n) {
  if (!uses_nearest_neighbor_index(rule)) return index_worst_case_regret(rule, study);
  if (!(range.lo < range.hi)) throw Error(ErrorCode::InvalidInterval, "gamma range must satisfy lo < hi");
  const ScalarMax best = maximize_scalar([&](double g) { return profiled_regret(rule, study, g); }, range.lo,
                                         range.hi, grid_n, Tolerance{1e-12, 1e-12, 300});
  return {best.argmax, best.max};
}

WorstCase index_worst_case_regret(const DecisionRule& rule, const StudySet& study) {
  if (!is_scalar_index(rule)) throw Error(ErrorCode::UnsupportedRule, "rule has no scalar index");
  Eigen::VectorXd w;
  if (rule.as<Mixture>()) {
    if (!uses_nearest_neighbor_index(rule)) {
      throw Error(ErrorCode::UnsupportedRule, "mixture components must share the nearest-neighbor index");
    }
    w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(study.size()));
    w(0) = 1.0;
  } else {
    w = index_weights(rule, study.size());
  }
  if ((w.array() < 0.0).any()) throw Error(ErrorCode::UnsupportedRule, "index weights must be nonnegative");

  // Least favorable points put every signal at the edge of its Lipschitz
  // band: mu_i = u - r_i when the contrast is +u, mu_i = r_i - v when it is -v.
  const Eigen::VectorXd r = study.radius();
  const double s = index_sd(w, study);
  const double total = w.sum();
  const double wr = w.dot(r);
  const double k = study.k();
  const auto positive = [&](double u) { return u * (1.0 - adoption_probability(rule, total * u - wr, s)); };
  const auto negative = [&](double v) { return v * adoption_probability(rule, wr - total * v, s); };

  double cap = 4.0 * (wr / total + s / total + k);
  if (const auto* t = rule.as<Threshold>()) cap += 4.0 * std::abs(t->c) / total;
  int doublings = 0;
  while (positive(cap) > 1e-10 * k || negative(cap) > 1e-10 * k) {
    if (++doublings > 60) return {kInf, kInf};
    cap *= 2.0;
  }
  const Tolerance tol{1e-12, 1e-13, 400};
  const ScalarMax up = maximize_scalar(positive, 0.0, cap, 4096, tol);
  const ScalarMax down = maximize_scalar(negative, 0.0, cap, 4096, tol);
  if (up.max >= down.max) return {up.argmax - r(0), up.max};
  return {r(0) - down.argmax, down.max};
}

namespace {

void collect_breaks(const DecisionRule& rule, std::vector<double>& out) {
  if (const auto* t = rule.as<Threshold>()) out.push_back(t->c);
  if (const auto* l = rule.as<Linear>()) {
    out.push_back(-l->rho);
    out.push_back(l->rho);
  }
  if (const auto* m = rule.as<Mixture>()) {
    for (const auto& c : m->components) collect_breaks(c, out);
  }
}

}  // namespace

double expected_cost(const DecisionRule& rule, double gamma, double sigma, const CostFunction& cost) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  if (rule.as<PlugIn>()) throw Error(ErrorCode::UnsupportedRule, "plug-in rule has no scalar-index cost");
  if (rule.as<Threshold>() || rule.as<NoData>()) return 0.0;
  if (rule.as<CoinFlip>()) return cost(0.5);
  if (cost.kind == CostFunction::Kind::Constant) {
    if (const auto* l = rule.as<Linear>()) {
      return cost.c * (std_normal_cdf((l->rho - gamma) / sigma) - std_normal_cdf((-l->rho - gamma) / sigma));
    }
    if (rule.as<RtSmooth>()) return cost.c;
  }
  std::vector<double> breaks{0.0};
  collect_breaks(rule, breaks);
  const auto integrand = [&](double t) {
    return cost(std::clamp(evaluate(rule, t), 0.0, 1.0)) * std_normal_pdf((t - gamma) / sigma) / sigma;
  };
  return integrate_piecewise(integrand, gamma - 12.0 * sigma, gamma + 12.0 * sigma, breaks,
                             Tolerance{1e-12, 1e-10, 400});
}

double net_of_cost_profiled_regret(const DecisionRule& rule, const StudySet& study, double gamma,
                                   const CostFunction& cost) {
  return profiled_regret(rule, study, gamma) + expected_cost(rule, gamma, study.sigma()(0), cost);
}

double aversion_threshold(const StudySet& study) {
  if (classify_regime(study) != Regime::LargeId) {
    throw Error(ErrorCode::PreconditionViolated, "aversion threshold needs the large identified set regime");
  }
  const double k = study.k();
  const double s1 = study.sigma()(0);
  const double rho = solve_rho_star(k, s1);
  const double span = k + 12.0 * s1;
  const WorstCase threshold = worst_case_regret(DecisionRule::threshold(0.0), study, {-span, span}, 4001);
  return (threshold.value - 0.5 * k) / std_normal_central_mass(rho / s1);
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::ADominates:
      return "ADominates";
    case Verdict::BDominates:
      return "BDominates";
    case Verdict::Incomparable:
      return "Incomparable";
  }
  return "unknown";
}

DominanceReport dominance_check(const DecisionRule& rule_a, const DecisionRule& rule_b, const StudySet& study,
                                const std::vector<double>& gamma_grid) {
  if (gamma_grid.empty()) throw Error(ErrorCode::InvalidArgument, "dominance check needs a nonempty grid");
  std::vector<double> diff(gamma_grid.size());
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    diff[i] = profiled_regret(rule_a, study, gamma_grid[i]) - profiled_regret(rule_b, study, gamma_grid[i]);
  }

  DominanceReport out{Verdict::Incomparable, {}, 0};
  std::ptrdiff_t last = -1;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (std::abs(diff[i]) <= kDominanceTol) continue;
    if (last >= 0 && (diff[i] > 0.0) != (diff[static_cast<std::size_t>(last)] > 0.0)) {
      const double g0 = gamma_grid[static_cast<std::size_t>(last)];
      const double d0 = diff[static_cast<std::size_t>(last)];
      out.crossings.push_back(g0 + (gamma_grid[i] - g0) * d0 / (d0 - diff[i]));
    }
    last = static_cast<std::ptrdiff_t>(i);
  }

  const bool a_ok = std::all_of(diff.begin(), diff.end(), [](double d) { return d <= kDominanceTol; });
  const bool b_ok = std::all_of(diff.begin(), diff.end(), [](double d) { return d >= -kDominanceTol; });
  if (a_ok) {
    out.verdict = Verdict::ADominates;
    out.strict_count = static_cast<std::size_t>(
        std::count_if(diff.begin(), diff.end(), [](double d) { return d < -kDominanceTol; }));
  } else if (b_ok) {
    out.verdict = Verdict::BDominates;
    out.strict_count = static_cast<std::size_t>(
        std::count_if(diff.begin(), diff.end(), [](double d) { return d > kDominanceTol; }));
  }
  return out;
}

LinearSmoothReport linear_smooth_case(const StudySet& study) {
  if (classify_regime(study) != Regime::LargeId) {
    throw Error(ErrorCode::PreconditionViolated, "linear-vs-smooth comparison needs the large identified set regime");
  }
  const double k = study.k();
  const double s1 = study.sigma()(0);
  const double rho = solve_rho_star(k, s1);
  const double ratio = k / (kSqrtHalfPi * s1);
  LinearSmoothReport out{LinearSmoothCase::LinearDominates, std_normal_pdf(rho / s1) * ratio * ratio * ratio, std_normal_pdf(0.0),
                  std::nullopt};
  if (out.lhs <= out.rhs) return out;
  out.which = LinearSmoothCase::Crossing;

  // gamma = 0 is always a root; the crossing of interest lies to its right.
  const DecisionRule lin = DecisionRule::linear(rho);
  const DecisionRule rt = DecisionRule::rt_smooth(sigma_tilde(k, s1));
  const auto h = [&](double g) { return adoption_probability(lin, g, s1) - adoption_probability(rt, g, s1); };
  const auto grid = linspace(0.0, k + 12.0 * s1, 4001);
  for (std::size_t i = 2; i < grid.size(); ++i) {
    const double a = h(grid[i - 1]);
    const double b = h(grid[i]);
    if (a == 0.0 || (a > 0.0) != (b > 0.0)) {
      out.gamma_lower = find_root(h, grid[i - 1], grid[i], Tolerance{1e-15, 1e-14, 400});
      break;
    }
  }
  return out;
}

std::vector<RegretCurve> regret_curve(const std::vector<DecisionRule>& rules, const StudySet& study,
                                      const std::vector<double>& gamma_grid, const std::optional<CostFunction>& cost) {
  if (gamma_grid.empty()) throw Error(ErrorCode::InvalidArgument, "regret curve needs a nonempty grid");
  std::vector<RegretCurve> out;
  out.reserve(rules.size());
  for (const auto& rule : rules) {
    RegretCurve curve{gamma_grid, std::vector<double>(gamma_grid.size()), rule_label(rule)};
    parallel_for(gamma_grid.size(), [&](std::size_t i) {
      curve.regret[i] = cost ? net_of_cost_profiled_regret(rule, study, gamma_grid[i], *cost)
                             : profiled_regret(rule, study, gamma_grid[i]);
    });
    out.push_back(std::move(curve));
  }
  return out;
}

Estimate plugin_profiled_regret(const StudySet& study, double gamma, const NormalSampler& sampler, int mu2_grid_n) {
  const std::size_t n = study.size();
  if (n > 2) throw Error(ErrorCode::UnsupportedRule, "plug-in profiled regret is implemented for n <= 2");
  if (!std::isfinite(gamma)) throw Error(ErrorCode::NonFiniteInput, "gamma must be finite");

  const auto regret_at = [&](const Eigen::VectorXd& mu) {
    const WelfareBounds b = welfare_bounds(study, mu);
    const Estimate p = sampled_plugin_action(study, mu, sampler);
    double value = 0.0;
    double scale = 0.0;
    if (b.upper >= 0.0 && b.upper * (1.0 - p.value) > value) {
      value = b.upper * (1.0 - p.value);
      scale = b.upper;
    }
    if (b.lower <= 0.0 && -b.lower * p.value > value) {
      value = -b.lower * p.value;
      scale = -b.lower;
    }
    return Estimate{value, scale * p.std_error};
  };

  Eigen::VectorXd mu(static_cast<Eigen::Index>(n));
  mu(0) = gamma;
  if (n == 1) return regret_at(mu);
  if (mu2_grid_n < 2) throw Error(ErrorCode::InvalidArgument, "mu2 grid needs at least two points");
  const double l12 = study.pairwise_bound()(0, 1);
  const auto grid = linspace(gamma - l12, gamma + l12, static_cast<std::size_t>(mu2_grid_n));
  std::vector<Estimate> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    Eigen::VectorXd m = mu;
    m(1) = grid[i];
    values[i] = regret_at(m);
  });
  return *std::max_element(values.begin(), values.end(),
                           [](const Estimate& a, const Estimate& b) { return a.value < b.value; });
}

}  // namespace mmrkit
