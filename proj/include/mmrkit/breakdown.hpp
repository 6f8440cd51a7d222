#pragma once

#include <vector>

#include "mmrkit/rules.hpp"

namespace mmrkit {

/// Sensitivity primitives for omitted-variable bias in a scalar coefficient.
struct OvbInputs {
  double var_y_perp;  // var(Y residualized on D and X)
  double var_d_perp;  // var(D residualized on X)
  double r2_dx;       // R^2 of D on X
  double rbar_d;      // sensitivity bound on the omitted variable
  double sigma;       // standard error of the estimate

  void validate() const;
};

/// Half-width k of the identified set [beta - k, beta + k]; +infinity once
/// rbar_d reaches sqrt(1 - r2_dx).
double dsb_k(const OvbInputs& inputs);

/// k~(beta_hat) = beta_hat. Throws NonPositiveEstimate for beta_hat <= 0.
double naive_breakdown(double beta_hat);

/// MMR rule for a scalar estimate with standard error sigma and identified
/// set half-width k: the threshold at zero if k <= sqrt(pi/2) sigma,
/// otherwise the linear rule with rho*(k, sigma).
DecisionRule ovb_rule(double k, double sigma);

/// Largest k at which the MMR rule still adopts fully at beta_hat, i.e. the
/// k solving rho*(k, sigma) = beta_hat. Root-finds in k.
double decision_breakdown(double beta_hat, double sigma);

/// beta_hat / (1 - 2 Phi(-beta_hat / sigma)), the same quantity in closed form.
double decision_breakdown_closed_form(double beta_hat, double sigma);

struct SignedBreakdown {
  double k_bar;
  /// Set when beta_hat <= 0 and the value comes from the symmetric extension.
  bool symmetric_extension;
};

/// decision_breakdown extended to beta_hat <= 0: k_bar(-beta_hat) for
/// negative estimates and sqrt(pi/2) sigma (the limit) at zero.
SignedBreakdown decision_breakdown_signed(double beta_hat, double sigma);

struct BreakdownRow {
  double beta_hat;
  double k_tilde;
  double k_bar;
};

std::vector<BreakdownRow> breakdown_curve(double sigma, const std::vector<double>& beta_grid);

}  // namespace mmrkit
