#include "mmrkit/identified_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmrkit/error.hpp"

namespace mmrkit {

namespace {

void check_size(const StudySet& study, const Eigen::VectorXd& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != study.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " + std::to_string(v.size()) +
                                                  ", study has " + std::to_string(study.size()) + " signals");
  }
}

Eigen::MatrixXd column_matrix(const std::vector<double>& x) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = x[i];
  return m;
}

}  // namespace

StudySet::StudySet(const Eigen::MatrixXd& x, const Eigen::VectorXd& x0, const Eigen::VectorXd& sigma,
                   double lipschitz_c)
    : x0_(x0), c_(lipschitz_c) {
  const Eigen::Index n = x.rows();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "study needs at least one signal");
  if (x.cols() != x0.size()) throw Error(ErrorCode::DimensionMismatch, "covariate dimension differs from x0");
  if (sigma.size() != n) throw Error(ErrorCode::DimensionMismatch, "sigma length differs from number of signals");
  if (!(lipschitz_c > 0.0) || !std::isfinite(lipschitz_c)) {
    throw Error(ErrorCode::InvalidArgument, "Lipschitz constant must be positive and finite");
  }
  if (!x.allFinite() || !x0.allFinite() || !sigma.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, "study inputs must be finite");
  }
  if ((sigma.array() <= 0.0).any()) throw Error(ErrorCode::InvalidArgument, "standard errors must be positive");

  Eigen::VectorXd dist(n);
  for (Eigen::Index i = 0; i < n; ++i) dist(i) = (x.row(i).transpose() - x0).norm();

  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return dist(static_cast<Eigen::Index>(a)) < dist(static_cast<Eigen::Index>(b));
  });

  x_.resize(n, x.cols());
  sigma_.resize(n);
  distance_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = static_cast<Eigen::Index>(order_[static_cast<std::size_t>(i)]);
    x_.row(i) = x.row(src);
    sigma_(i) = sigma(src);
    distance_(i) = dist(src);
  }

  if (!(distance_(0) > 0.0)) throw Error(ErrorCode::InvalidArgument, "nearest signal coincides with x0");
  if (n > 1 && !(distance_(0) < distance_(1))) {
    throw Error(ErrorCode::InvalidArgument, "nearest neighbor of x0 is tied; merge tied signals first");
  }

  pairwise_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = (x_.row(i) - x_.row(j)).norm();
      if (i != j && d == 0.0) throw Error(ErrorCode::InvalidArgument, "signals must sit at distinct covariates");
      pairwise_(i, j) = c_ * d;
    }
  }
}

StudySet::StudySet(const std::vector<double>& x, double x0, const std::vector<double>& sigma, double lipschitz_c)
    : StudySet(column_matrix(x), Eigen::VectorXd::Constant(1, x0),
               Eigen::Map<const Eigen::VectorXd>(sigma.data(), static_cast<Eigen::Index>(sigma.size())),
               lipschitz_c) {}

WelfareBounds welfare_bounds(const StudySet& study, const Eigen::VectorXd& mu) {
  check_size(study, mu, "mu");
  const Eigen::VectorXd r = study.radius();
  WelfareBounds b{(mu - r).maxCoeff(), (mu + r).minCoeff(), !membership_in_m(study, mu)};
  // On the boundary of M the set is a single point; rounding can flip the ends.
  if (!b.outside_m && b.lower > b.upper) b.lower = b.upper = 0.5 * (b.lower + b.upper);
  return b;
}

double k_bar(const StudySet& study, double gamma) { return gamma + study.k(); }

double k_lower(const StudySet& study, double gamma) { return -k_bar(study, -gamma); }

bool membership_in_m(const StudySet& study, const Eigen::VectorXd& mu) {
  check_size(study, mu, "mu");
  const auto& bound = study.pairwise_bound();
  const Eigen::Index n = mu.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double slack = 1e-12 * std::max(1.0, bound(i, j));
      if (std::abs(mu(i) - mu(j)) > bound(i, j) + slack) return false;
    }
  }
  return true;
}

bool nontrivial_pi(const StudySet& study, const Eigen::VectorXd& mu) {
  const auto b = welfare_bounds(study, mu);
  return b.lower < 0.0 && 0.0 < b.upper;
}

Eigen::VectorXd project_to_m(const StudySet& study, const Eigen::VectorXd& y, const ProjectionOptions& opts) {
  check_size(study, y, "y");
  if (!y.allFinite()) throw Error(ErrorCode::NonFiniteInput, "y must be finite");
  const Eigen::Index n = y.size();
  if (n == 1 || membership_in_m(study, y)) return y;

  // Half-spaces mu_i - mu_j <= b_ij for every ordered pair. In the metric
  // with weights 1/sigma^2, projecting onto a^T mu <= b moves mu along
  // Sigma a, where Sigma = diag(sigma^2).
  struct HalfSpace {
    Eigen::Index i, j;
    double bound;
  };
  std::vector<HalfSpace> faces;
  const auto& bound = study.pairwise_bound();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) faces.push_back({i, j, bound(i, j)});
    }
  }
  const Eigen::VectorXd var = study.variance();

  Eigen::VectorXd mu = y;
  // Dykstra increments, one per half-space, stored as the scalar multiple of Sigma a.
  std::vector<double> increment(faces.size(), 0.0);
  const double scale = 1.0 + y.cwiseAbs().maxCoeff();

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const auto& h = faces[f];
      const double denom = var(h.i) + var(h.j);
      // z = mu + p_f, where p_f = increment[f] * Sigma a.
      const double zi = mu(h.i) + increment[f] * var(h.i);
      const double zj = mu(h.j) - increment[f] * var(h.j);
      const double excess = zi - zj - h.bound;
      const double t = excess > 0.0 ? excess / denom : 0.0;
      const double new_i = zi - t * var(h.i);
      const double new_j = zj + t * var(h.j);
      change = std::max({change, std::abs(new_i - mu(h.i)), std::abs(new_j - mu(h.j))});
      mu(h.i) = new_i;
      mu(h.j) = new_j;
      increment[f] = t;
    }
    if (change <= opts.tolerance * scale && membership_in_m(study, mu)) return mu;
  }
  throw Error(ErrorCode::NoConvergence, "projection onto M did not converge");
}

WelfareBounds estimated_bounds(const StudySet& study, const Eigen::VectorXd& y, const ProjectionOptions& opts) {
  return welfare_bounds(study, project_to_m(study, y, opts));
}

}  // namespace mmrkit
