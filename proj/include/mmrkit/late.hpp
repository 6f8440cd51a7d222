#pragma once

#include <span>

#include "mmrkit/identified_set.hpp"
#include "mmrkit/numerics.hpp"

namespace mmrkit {

/// Reduced form of a binary-instrument design: mu1 is the reduced-form
/// coefficient, mu2 the first stage, alpha the propensity shift of the
/// policy being extrapolated to.
struct LateInputs {
  double alpha;
  double mu1;
  double mu2;
};

/// Bounds on PRTE(alpha) - LATE:
/// mu1/(alpha+mu2) - mu1/mu2 -+ alpha/(alpha+mu2).
WelfareBounds late_bounds(const LateInputs& inputs);

/// lower < 0 < upper.
bool late_nontrivial(const LateInputs& inputs);

/// PRTE(alpha) - LATE for propensities p0 <= p1 and a marginal treatment
/// effect curve on [0, 1] with values in [-1, 1]. `breaks` are optional
/// discontinuities of `mte` handed to the quadrature.
double late_welfare_contrast(double alpha, double p0, double p1, const ScalarFn& mte,
                             std::span<const double> breaks = {});

}  // namespace mmrkit
