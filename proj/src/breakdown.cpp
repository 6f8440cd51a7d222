#include "mmrkit/breakdown.hpp"

#include <cmath>
#include <limits>

#include "mmrkit/error.hpp"
#include "mmrkit/mmr.hpp"
#include "mmrkit/numerics.hpp"

namespace mmrkit {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
}

void check_estimate(double beta_hat) {
  if (!std::isfinite(beta_hat)) {
    throw Error(ErrorCode::NonFiniteInput, "estimate must be finite");
  }
  if (!(beta_hat > 0.0)) throw Error(ErrorCode::NonPositiveEstimate, "estimate must be positive");
}

}  // namespace

void OvbInputs::validate() const {
  const bool finite = std::isfinite(var_y_perp) && std::isfinite(var_d_perp) && std::isfinite(r2_dx) &&
                      std::isfinite(rbar_d) && std::isfinite(sigma);
  if (!finite) throw Error(ErrorCode::NonFiniteInput, "sensitivity inputs must be finite");
  if (!(var_y_perp >= 0.0) || !(var_d_perp > 0.0) || !(r2_dx >= 0.0 && r2_dx < 1.0) || !(rbar_d >= 0.0) ||
      !(sigma > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "need var_y_perp >= 0, var_d_perp > 0, 0 <= r2_dx < 1, rbar_d >= 0, sigma > 0");
  }
}

double dsb_k(const OvbInputs& in) {
  in.validate();
  if (in.rbar_d >= std::sqrt(1.0 - in.r2_dx)) return std::numeric_limits<double>::infinity();
  const double r2 = in.rbar_d * in.rbar_d;
  return std::sqrt(in.var_y_perp / in.var_d_perp * r2 * in.r2_dx / (1.0 - in.r2_dx - r2));
}

double naive_breakdown(double beta_hat) {
  check_estimate(beta_hat);
  return beta_hat;
}

DecisionRule ovb_rule(double k, double sigma) {
  check_sigma(sigma);
  if (!(k >= 0.0) || !std::isfinite(k)) throw Error(ErrorCode::InvalidArgument, "k must be finite and >= 0");
  if (k <= kSqrtHalfPi * sigma) return DecisionRule::threshold(0.0);
  return DecisionRule::linear(solve_rho_star(k, sigma));
}

double decision_breakdown_closed_form(double beta_hat, double sigma) {
  check_estimate(beta_hat);
  check_sigma(sigma);
  return beta_hat / std_normal_central_mass(beta_hat / sigma);
}

double decision_breakdown(double beta_hat, double sigma) {
  check_estimate(beta_hat);
  check_sigma(sigma);
  const double edge = kSqrtHalfPi * sigma;
  const auto f = [&](double k) { return solve_rho_star(k, sigma) - beta_hat; };

  double lo = edge * (1.0 + 1e-12);
  if (f(lo) >= 0.0) return decision_breakdown_closed_form(beta_hat, sigma);
  double hi = 2.0 * edge;
  for (int i = 0; f(hi) < 0.0; ++i) {
    if (i > 200) throw Error(ErrorCode::NoBracket, "no upper bracket for the breakdown point");
    lo = hi;
    hi *= 2.0;
  }
  return find_root(f, lo, hi, Tolerance{1e-300, 1e-15, 400});
}

SignedBreakdown decision_breakdown_signed(double beta_hat, double sigma) {
  check_sigma(sigma);
  if (!std::isfinite(beta_hat)) throw Error(ErrorCode::NonFiniteInput, "estimate must be finite");
  if (beta_hat > 0.0) return {decision_breakdown(beta_hat, sigma), false};
  if (beta_hat < 0.0) return {decision_breakdown(-beta_hat, sigma), true};
  return {kSqrtHalfPi * sigma, true};
}

std::vector<BreakdownRow> breakdown_curve(double sigma, const std::vector<double>& beta_grid) {
  std::vector<BreakdownRow> rows;
  rows.reserve(beta_grid.size());
  for (double b : beta_grid) rows.push_back({b, naive_breakdown(b), decision_breakdown(b, sigma)});
  return rows;
}

}  // namespace mmrkit
