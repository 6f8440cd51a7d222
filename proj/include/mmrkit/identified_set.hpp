#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace mmrkit {

/// Signals from n studies of a policy, each at covariate x_i with standard
/// error sigma_i, used to extrapolate to a target unit at x0 under a
/// C-Lipschitz restriction on the effect function.
///
/// Studies are stored sorted by distance to x0, so index 0 is the unique
/// nearest neighbor. Every vector argument (mu, y, weights) handed to the
/// library uses this sorted order; `original_index(i)` maps back.
class StudySet {
 public:
  /// `x` holds one covariate vector per row. Throws InvalidArgument when the
  /// nearest neighbor is tied, sits on x0, or any input is malformed.
  StudySet(const Eigen::MatrixXd& x, const Eigen::VectorXd& x0, const Eigen::VectorXd& sigma,
           double lipschitz_c);

  /// Scalar-covariate convenience constructor.
  StudySet(const std::vector<double>& x, double x0, const std::vector<double>& sigma, double lipschitz_c);

  std::size_t size() const { return static_cast<std::size_t>(sigma_.size()); }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& x0() const { return x0_; }
  const Eigen::VectorXd& sigma() const { return sigma_; }
  double lipschitz() const { return c_; }

  /// ||x_i - x0|| in sorted order (strictly increasing at the first step).
  const Eigen::VectorXd& distance() const { return distance_; }

  /// C ||x_i - x0||: radius each signal leaves for the target effect.
  Eigen::VectorXd radius() const { return c_ * distance_; }

  /// k = C ||x_1 - x0||, the half-width of the identified set at mu = 0.
  double k() const { return c_ * distance_(0); }

  /// Pairwise Lipschitz bounds C ||x_i - x_j|| defining M.
  const Eigen::MatrixXd& pairwise_bound() const { return pairwise_; }

  std::size_t original_index(std::size_t sorted) const { return order_[sorted]; }

  /// Reduced-form covariance (diagonal).
  Eigen::VectorXd variance() const { return sigma_.array().square(); }

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd x0_;
  Eigen::VectorXd sigma_;
  double c_;
  Eigen::VectorXd distance_;
  Eigen::MatrixXd pairwise_;
  std::vector<std::size_t> order_;
};

struct WelfareBounds {
  double lower;
  double upper;
  /// Set when the reduced-form point handed in lies outside M; the formulas
  /// are still evaluated but lower <= upper need not hold.
  bool outside_m = false;
};

/// Intersection bounds: lower = max_i (mu_i - C||x_i - x0||),
/// upper = min_i (mu_i + C||x_i - x0||).
WelfareBounds welfare_bounds(const StudySet& study, const Eigen::VectorXd& mu);

/// Largest welfare contrast given mu_1 = gamma: gamma + k.
double k_bar(const StudySet& study, double gamma);

/// Smallest welfare contrast given mu_1 = gamma: -k_bar(-gamma).
double k_lower(const StudySet& study, double gamma);

/// |mu_i - mu_j| <= C||x_i - x_j|| for all pairs, with 1e-12 slack.
bool membership_in_m(const StudySet& study, const Eigen::VectorXd& mu);

/// lower < 0 < upper.
bool nontrivial_pi(const StudySet& study, const Eigen::VectorXd& mu);

struct ProjectionOptions {
  double tolerance = 1e-9;
  int max_sweeps = 10000;
};

/// Gaussian MLE of mu under mu in M: argmin sum_i (y_i - mu_i)^2 / sigma_i^2.
/// Cyclic Dykstra projection onto the pairwise half-spaces in the
/// sigma-weighted metric.
Eigen::VectorXd project_to_m(const StudySet& study, const Eigen::VectorXd& y, const ProjectionOptions& opts = {});

/// Plug-in bounds: welfare_bounds at project_to_m(y).
WelfareBounds estimated_bounds(const StudySet& study, const Eigen::VectorXd& y, const ProjectionOptions& opts = {});

}  // namespace mmrkit
