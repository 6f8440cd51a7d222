#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmrkit/identified_set.hpp"
#include "mmrkit/rules.hpp"

namespace mmrkit {

/// Penalty for fractional actions; zero at a in {0, 1}.
struct CostFunction {
  enum class Kind { Linear, Quadratic, Constant };

  Kind kind;
  double c;

  static CostFunction linear(double c);
  static CostFunction quadratic(double c);
  static CostFunction constant(double c);

  double operator()(double a) const;
};

std::string to_string(CostFunction::Kind kind);

struct RegretCurve {
  std::vector<double> gamma;
  std::vector<double> regret;
  std::string rule_label;
};

struct GammaRange {
  double lo;
  double hi;
};

/// Quasi-Monte-Carlo settings for rules without a closed-form adoption
/// probability. `points` are split evenly across `replicates` random shifts
/// of one Sobol sequence; the spread of replicate means gives the error.
struct QmcOptions {
  std::size_t points = std::size_t{1} << 16;
  std::size_t replicates = 16;
  std::uint64_t seed = 0;
};

struct Estimate {
  double value;
  double std_error;
};

/// Standard-normal QMC draws for an n-signal study, reusable across means.
class NormalSampler {
 public:
  NormalSampler(std::size_t dimension, const QmcOptions& options);

  std::size_t replicates() const { return draws_.size(); }
  /// points_per_replicate x dimension.
  const Eigen::MatrixXd& replicate(std::size_t r) const { return draws_[r]; }

 private:
  std::vector<Eigen::MatrixXd> draws_;
};

/// E_mu[d(Y)] with Y ~ N(mu, diag(sigma^2)); exact for scalar-index rules.
Estimate expected_action(const DecisionRule& rule, const StudySet& study, const Eigen::VectorXd& mu,
                         const QmcOptions& qmc = {});

/// u0 (1{u0 >= 0} - E_mu[d(Y)]) for a welfare contrast u0 in [I_lower(mu), I_upper(mu)].
double expected_regret(const DecisionRule& rule, const StudySet& study, const Eigen::VectorXd& mu, double u0,
                       const QmcOptions& qmc = {});

/// Worst-case expected regret holding mu_1 = gamma fixed, for rules on the
/// nearest-neighbor index.
double profiled_regret(const DecisionRule& rule, const StudySet& study, double gamma);

/// Same profile, written in terms of a given adoption probability.
double profiled_regret_from_adoption(double gamma, double k, double adoption);

struct WorstCase {
  double gamma_star;
  double value;
};

/// Sup of profiled_regret over the range (grid scan plus golden refinement).
WorstCase worst_case_regret(const DecisionRule& rule, const StudySet& study, const GammaRange& range,
                            int grid_n = 2001);

/// Sup of expected regret over the whole running-example parameter space for
/// a monotone rule on w'Y with nonnegative w (the rule's own index).
WorstCase index_worst_case_regret(const DecisionRule& rule, const StudySet& study);

/// E_gamma[c(d(T))], T ~ N(gamma, sigma^2).
double expected_cost(const DecisionRule& rule, double gamma, double sigma, const CostFunction& cost);

double net_of_cost_profiled_regret(const DecisionRule& rule, const StudySet& study, double gamma,
                                   const CostFunction& cost);

/// Largest constant cost under which the linear rule stays net-of-cost
/// minimax among MMR rules and index thresholds.
double aversion_threshold(const StudySet& study);

enum class Verdict { ADominates, BDominates, Incomparable };

std::string to_string(Verdict verdict);

struct DominanceReport {
  Verdict verdict;
  /// Interpolated gamma where the regret difference changes sign.
  std::vector<double> crossings;
  /// Grid points where the dominating rule is better by more than the tolerance.
  std::size_t strict_count;
};

DominanceReport dominance_check(const DecisionRule& rule_a, const DecisionRule& rule_b, const StudySet& study,
                                const std::vector<double>& gamma_grid);

enum class LinearSmoothCase { LinearDominates, Crossing };

struct LinearSmoothReport {
  LinearSmoothCase which;
  /// phi(rho*/sigma) (k / (sqrt(pi/2) sigma))^3, compared against phi(0).
  double lhs;
  double rhs;
  std::optional<double> gamma_lower;
};

/// Linear-vs-smooth comparison condition for a large-identified-set study.
LinearSmoothReport linear_smooth_case(const StudySet& study);

std::vector<RegretCurve> regret_curve(const std::vector<DecisionRule>& rules, const StudySet& study,
                                      const std::vector<double>& gamma_grid,
                                      const std::optional<CostFunction>& cost = std::nullopt);

/// Profiled regret of the plug-in rule at mu_1 = gamma, maximizing over the
/// remaining reduced-form coordinate on `mu2_grid_n` points. Supports n <= 2.
Estimate plugin_profiled_regret(const StudySet& study, double gamma, const NormalSampler& sampler,
                                int mu2_grid_n = 17);

}  // namespace mmrkit
