#include "mmrkit/mmr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmrkit/error.hpp"
#include "mmrkit/numerics.hpp"
#include "mmrkit/regret.hpp"

namespace mmrkit {

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::PointLike:
      return "PointLike";
    case Regime::Boundary:
      return "Boundary";
    case Regime::LargeId:
      return "LargeId";
  }
  return "unknown";
}

Regime classify_regime(const StudySet& study) {
  const double k = study.k();
  const double edge = kSqrtHalfPi * study.sigma()(0);
  if (std::abs(k - edge) <= 1e-12 * edge) return Regime::Boundary;
  return k < edge ? Regime::PointLike : Regime::LargeId;
}

double solve_rho_star(double k, double sigma) {
  if (!std::isfinite(k) || !std::isfinite(sigma) || sigma < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "solve_rho_star needs finite k and sigma >= 0");
  }
  if (!(k > kSqrtHalfPi * sigma)) {
    throw Error(ErrorCode::PreconditionViolated, "rho* exists only when k > sqrt(pi/2) sigma");
  }
  if (sigma == 0.0) return k;
  const auto f = [&](double rho) { return k * std_normal_central_mass(rho / sigma) - rho; };
  if (f(k) >= 0.0) return k;
  // f is flat near the boundary, so stop on bracket width rather than |f|.
  Tolerance tol{1e-300, 1e-15, 400};
  return find_root(f, 1e-12 * k, k, tol);
}

double sigma_tilde(double k, double sigma) {
  if (!std::isfinite(k) || !std::isfinite(sigma) || sigma < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "sigma_tilde needs finite k and sigma >= 0");
  }
  const double edge = kSqrtHalfPi * sigma;
  if (k < edge && std::abs(k - edge) > 1e-12 * edge) {
    throw Error(ErrorCode::PreconditionViolated, "sigma_tilde needs k >= sqrt(pi/2) sigma");
  }
  return std::sqrt(std::max(0.0, 2.0 * k * k / kPi - sigma * sigma));
}

Eigen::VectorXd m0_weights(const StudySet& study, double m0) {
  const Eigen::VectorXd r = study.radius();
  const Eigen::VectorXd var = study.variance();
  const auto n = r.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w(0) = 1.0;
  const double a1 = m0 - r(0);
  if (!(a1 > 0.0)) return w;
  for (Eigen::Index j = 1; j < n; ++j) {
    const double aj = std::max(m0 - r(j), 0.0);
    w(j) = (aj / var(j)) / (a1 / var(0));
  }
  return w;
}

namespace {

double index_sd(const Eigen::VectorXd& w, const StudySet& study) {
  return std::sqrt(w.array().square().matrix().dot(study.variance()));
}

// Phi(-a) / phi(a), with the asymptotic series once phi(a) gets tiny.
double mills_ratio(double a) {
  if (a > 25.0) {
    const double inv2 = 1.0 / (a * a);
    return (1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)))) / a;
  }
  return std_normal_cdf(-a) / std_normal_pdf(a);
}

}  // namespace

double best_response_objective(const StudySet& study, double mu0, double m0) {
  const Eigen::VectorXd w = m0_weights(study, m0);
  const Eigen::VectorXd r = study.radius();
  const double shift = w.dot((Eigen::VectorXd::Constant(r.size(), mu0) - r));
  return mu0 * std_normal_cdf(-shift / index_sd(w, study));
}

double best_response_cap(const StudySet& study) {
  const Eigen::VectorXd r = study.radius();
  const Eigen::VectorXd& s = study.sigma();
  const double k = study.k();
  const auto bound = [&](double mu0) {
    double prod = 1.0;
    for (Eigen::Index j = 0; j < r.size(); ++j) prod *= std_normal_cdf(std::max(mu0 - r(j), 0.0) / s(j));
    return mu0 * (1.0 - prod);
  };
  double cap = std::max(k, s(0));
  for (int i = 0; i < 200; ++i) {
    if (bound(cap) < 1e-8 * k) return cap;
    cap *= 2.0;
  }
  throw Error(ErrorCode::NoConvergence, "could not bound the best-response search interval");
}

BestResponse best_response(const StudySet& study, double m0) {
  if (!(m0 >= study.k())) throw Error(ErrorCode::PreconditionViolated, "best_response needs m0 >= k");
  const double cap = best_response_cap(study);
  const ScalarMax best =
      maximize_scalar([&](double mu0) { return best_response_objective(study, mu0, m0); }, 0.0, cap, 2048,
                      Tolerance{1e-12, 1e-13, 400});
  return {best.argmax, best.max};
}

double m0_stationarity(const StudySet& study, double m0) {
  const Eigen::VectorXd r = study.radius();
  const Eigen::VectorXd var = study.variance();
  double a2 = 0.0;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const double aj = std::max(m0 - r(j), 0.0);
    a2 += aj * aj / var(j);
  }
  const double a = std::sqrt(a2);
  // B / A through the normalized weights stays finite as m0 -> k.
  const Eigen::VectorXd w = m0_weights(study, m0);
  const double b_over_a = w.sum() / index_sd(w, study);
  return mills_ratio(a) - m0 * b_over_a;
}

M0Solution solve_m0_star(const StudySet& study) {
  if (classify_regime(study) != Regime::PointLike) {
    throw Error(ErrorCode::PreconditionViolated, "m0* is defined only in the point-like regime");
  }
  const double k = study.k();
  const double s1 = study.sigma()(0);
  const auto f = [&](double m0) { return m0_stationarity(study, m0); };

  double hi = k + s1;
  for (int i = 0; f(hi) >= 0.0; ++i) {
    if (i > 200) throw Error(ErrorCode::NoBracket, "no upper bracket for m0*");
    hi = k + 2.0 * (hi - k);
  }

  const auto grid = linspace(k, hi, 401);
  std::vector<std::size_t> changes;
  double prev = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = f(grid[i]);
    if ((prev > 0.0) != (cur > 0.0)) changes.push_back(i);
    prev = cur;
  }
  if (changes.size() != 1) {
    throw Error(ErrorCode::NoConvergence,
                "stationarity equation for m0* has " + std::to_string(changes.size()) + " sign changes");
  }
  const std::size_t i = changes.front();
  const double m0 = find_root(f, grid[i - 1], grid[i], Tolerance{1e-14, 1e-15, 400});
  const double residual = std::abs(f(m0));
  if (!(residual < 1e-8)) throw Error(ErrorCode::NoConvergence, "m0* residual above 1e-8");
  const double gap = std::abs(best_response(study, m0).mu0_star - m0);
  return {m0, m0_weights(study, m0), residual, gap};
}

MmrSolution solve(const StudySet& study) {
  MmrSolution out;
  out.regime = classify_regime(study);
  out.k = study.k();
  const double s1 = study.sigma()(0);
  switch (out.regime) {
    case Regime::LargeId: {
      const double rho = solve_rho_star(out.k, s1);
      const double st = sigma_tilde(out.k, s1);
      out.rho_star = rho;
      out.sigma_tilde = st;
      out.mmr_value = 0.5 * out.k;
      out.rules = {DecisionRule::linear(rho), DecisionRule::rt_smooth(st)};
      break;
    }
    case Regime::Boundary:
      out.rules = {DecisionRule::threshold(0.0)};
      out.mmr_value = index_worst_case_regret(out.rules.front(), study).value;
      break;
    case Regime::PointLike: {
      M0Solution m = solve_m0_star(study);
      out.m0_star = m.m0_star;
      out.weights = m.weights;
      out.rules = {DecisionRule::threshold(0.0, m.weights)};
      out.mmr_value = index_worst_case_regret(out.rules.front(), study).value;
      break;
    }
  }
  return out;
}

MaximinSolution maximin(const StudySet&) { return {DecisionRule::no_data(), 0.0}; }

MmrVerification verify_mmr(const DecisionRule& rule, const StudySet& study, const std::vector<double>& gamma_grid) {
  if (gamma_grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "verify_mmr needs at least two grid points");
  const double s1 = study.sigma()(0);
  const double k = study.k();
  MmrVerification out{};
  out.e0_half = std::abs(adoption_probability(rule, 0.0, s1) - 0.5) < 1e-8;

  std::vector<double> values(gamma_grid.size());
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) values[i] = profiled_regret(rule, study, gamma_grid[i]);
  const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  out.worst_value = values[best];
  out.worst_gamma = gamma_grid[best];

  const std::size_t lo = best == 0 ? 0 : best - 1;
  const std::size_t hi = std::min(best + 1, gamma_grid.size() - 1);
  if (gamma_grid[lo] < gamma_grid[hi]) {
    const ScalarMax refined = maximize_scalar([&](double g) { return profiled_regret(rule, study, g); },
                                              gamma_grid[lo], gamma_grid[hi], 16, Tolerance{1e-12, 1e-12, 200});
    if (refined.max > out.worst_value) {
      out.worst_value = refined.max;
      out.worst_gamma = refined.argmax;
    }
  }

  double resolution = 0.0;
  for (std::size_t i = 1; i < gamma_grid.size(); ++i) {
    resolution = std::max(resolution, std::abs(gamma_grid[i] - gamma_grid[i - 1]));
  }
  const double target = solve(study).mmr_value;
  out.worst_at_zero = std::abs(out.worst_gamma) <= resolution && std::abs(out.worst_value - target) <= 1e-4 * k;
  return out;
}

}  // namespace mmrkit
