#include "mmrkit/late.hpp"

#include <cmath>

#include "mmrkit/error.hpp"

namespace mmrkit {

namespace {

void check_alpha(double alpha) {
  if (!std::isfinite(alpha)) throw Error(ErrorCode::NonFiniteInput, "alpha must be finite");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InfeasibleInputs, "alpha must lie in (0, 1)");
}

}  // namespace

WelfareBounds late_bounds(const LateInputs& in) {
  check_alpha(in.alpha);
  if (!std::isfinite(in.mu1) || !std::isfinite(in.mu2)) {
    throw Error(ErrorCode::NonFiniteInput, "reduced-form coefficients must be finite");
  }
  if (in.mu2 == 0.0) throw Error(ErrorCode::DegenerateFirstStage, "first stage is zero");
  constexpr double slack = 1e-12;
  if (std::abs(in.mu1) > in.mu2 + slack || in.mu2 < 0.0 || in.mu2 > 1.0 - in.alpha + slack) {
    throw Error(ErrorCode::InfeasibleInputs, "need |mu1| <= mu2 and 0 <= mu2 <= 1 - alpha");
  }
  const double center = in.mu1 / (in.alpha + in.mu2) - in.mu1 / in.mu2;
  const double half = in.alpha / (in.alpha + in.mu2);
  return {center - half, center + half, false};
}

bool late_nontrivial(const LateInputs& in) {
  const WelfareBounds b = late_bounds(in);
  return b.lower < 0.0 && 0.0 < b.upper;
}

double late_welfare_contrast(double alpha, double p0, double p1, const ScalarFn& mte,
                             std::span<const double> breaks) {
  check_alpha(alpha);
  if (!std::isfinite(p0) || !std::isfinite(p1) || !(p0 >= 0.0 && p0 <= p1 && p1 + alpha <= 1.0)) {
    throw Error(ErrorCode::InfeasiblePropensities, "need 0 <= p0 <= p1 and p1 + alpha <= 1");
  }
  if (p0 == p1) throw Error(ErrorCode::DegenerateFirstStage, "p0 = p1 leaves no compliers");
  const Tolerance tol{1e-12, 1e-12, 400};
  const double m1 = integrate_piecewise(mte, p0, p1, breaks, tol);
  const double m2 = p1 - p0;
  const double extra = integrate_piecewise(mte, p1, p1 + alpha, breaks, tol);
  return m1 / (alpha + m2) - m1 / m2 + extra / (alpha + m2);
}

}  // namespace mmrkit
