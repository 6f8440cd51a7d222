#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mmrkit {

/// Stopping rule shared by the root finder, the quadrature and the
/// golden-section refinement.
struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_iter = 200;

  /// Throws InvalidArgument unless abs_tol > 0, rel_tol > 0, max_iter >= 1.
  void validate() const;
};

using ScalarFn = std::function<double(double)>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2 pi)
inline constexpr double kSqrtHalfPi = 1.25331413731550025121;  // sqrt(pi/2)

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// P(-x < Z < x) for Z ~ N(0,1), i.e. 1 - 2 Phi(-x), without cancellation.
double std_normal_central_mass(double x);

/// Bracketing root finder: bisection with secant (Illinois) steps.
/// Requires f(lo) * f(hi) <= 0.
double find_root(const ScalarFn& f, double lo, double hi, const Tolerance& tol = {});

/// Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval. The
/// subdivision budget is 50 * tol.max_iter intervals.
double integrate(const ScalarFn& f, double a, double b, const Tolerance& tol = {});

/// Same as integrate, but splits [a, b] at the given interior points first.
double integrate_piecewise(const ScalarFn& f, double a, double b, std::span<const double> breaks,
                           const Tolerance& tol = {});

struct ScalarMax {
  double argmax;
  double max;
};

/// Scan grid_n equispaced points on [lo, hi], then golden-section refine
/// inside the two cells adjacent to the best grid point. The returned max is
/// never below the best grid value.
ScalarMax maximize_scalar(const ScalarFn& f, double lo, double hi, int grid_n = 256,
                          const Tolerance& tol = {});

/// Equispaced grid with n >= 2 points including both ends.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace mmrkit
