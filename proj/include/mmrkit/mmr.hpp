#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>
#include <vector>

#include "mmrkit/identified_set.hpp"
#include "mmrkit/rules.hpp"

namespace mmrkit {

/// Which side of k = sqrt(pi/2) * sigma_1 the study falls on.
enum class Regime { PointLike, Boundary, LargeId };

std::string_view to_string(Regime regime);

struct MmrSolution {
  Regime regime;
  double k;
  std::optional<double> rho_star;
  std::optional<double> sigma_tilde;
  std::optional<double> m0_star;
  std::optional<Eigen::VectorXd> weights;
  double mmr_value;
  std::vector<DecisionRule> rules;
};

Regime classify_regime(const StudySet& study);

/// Unique rho in (0, k] solving rho = k (1 - 2 Phi(-rho / sigma)).
/// Throws PreconditionViolated unless k > sqrt(pi/2) sigma.
double solve_rho_star(double k, double sigma);

/// sqrt(2 k^2 / pi - sigma^2); requires k >= sqrt(pi/2) sigma.
double sigma_tilde(double k, double sigma);

/// Normalized index weights w_{m0}: first entry 1, entry j proportional to
/// max(m0 - C||x_j - x0||, 0) / sigma_j^2. At m0 = k this is e_1.
Eigen::VectorXd m0_weights(const StudySet& study, double m0);

/// Regret of the symmetric threshold on w_{m0}'Y at the least favorable
/// prior supported on +-mu0.
double best_response_objective(const StudySet& study, double mu0, double m0);

/// Upper end of the search interval for mu0 (independent of m0).
double best_response_cap(const StudySet& study);

struct BestResponse {
  double mu0_star;
  double g_value;
};

/// argmax over mu0 in [0, best_response_cap] of best_response_objective.
BestResponse best_response(const StudySet& study, double m0);

struct M0Solution {
  double m0_star;
  Eigen::VectorXd weights;
  /// |LHS - RHS| of the stationarity equation at m0_star.
  double residual;
  /// |best_response(m0_star) - m0_star|.
  double fixed_point_gap;
};

/// Point-like regime: the m0 at which the threshold rule is a best response
/// to its own least favorable prior.
M0Solution solve_m0_star(const StudySet& study);

/// Residual Phi(-A)/phi(A) - m0 B / A of the stationarity equation.
double m0_stationarity(const StudySet& study, double m0);

MmrSolution solve(const StudySet& study);

struct MaximinSolution {
  DecisionRule rule;
  double value;
};

/// Never adopting guarantees welfare contrast zero, the maximin value.
MaximinSolution maximin(const StudySet& study);

struct MmrVerification {
  bool e0_half;
  bool worst_at_zero;
  double worst_value;
  double worst_gamma;
};

/// Checks E_0[d] = 1/2 and that the profiled regret over `gamma_grid` peaks
/// at gamma = 0 with the MMR value.
MmrVerification verify_mmr(const DecisionRule& rule, const StudySet& study, const std::vector<double>& gamma_grid);

}  // namespace mmrkit
