#include "mmrkit/rules.hpp"

#include <cmath>
#include <numeric>

#include "mmrkit/error.hpp"
#include "mmrkit/numerics.hpp"

namespace mmrkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double clamp01(double a) { return std::min(1.0, std::max(0.0, a)); }

bool is_unit_first(const Eigen::VectorXd& w) {
  if (w.size() == 0) return true;
  if (w(0) != 1.0) return false;
  return w.size() == 1 || w.tail(w.size() - 1).isZero(0.0);
}

}  // namespace

DecisionRule DecisionRule::threshold(double c, Eigen::VectorXd w) {
  if (std::isnan(c)) throw Error(ErrorCode::NonFiniteInput, "threshold cutoff is NaN");
  if (w.size() > 0 && !w.allFinite()) throw Error(ErrorCode::NonFiniteInput, "threshold weights must be finite");
  if (w.size() > 0 && w.isZero(0.0)) throw Error(ErrorCode::InvalidArgument, "threshold weights must be nonzero");
  return DecisionRule(Threshold{std::move(w), c});
}

DecisionRule DecisionRule::linear(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::InvalidArgument, "linear rule needs rho > 0");
  return DecisionRule(Linear{rho});
}

DecisionRule DecisionRule::rt_smooth(double sigma_tilde) {
  if (!(sigma_tilde > 0.0) || !std::isfinite(sigma_tilde)) {
    throw Error(ErrorCode::InvalidArgument, "smooth rule needs sigma_tilde > 0");
  }
  return DecisionRule(RtSmooth{sigma_tilde});
}

DecisionRule DecisionRule::coin_flip() { return DecisionRule(CoinFlip{}); }

DecisionRule DecisionRule::no_data() { return DecisionRule(NoData{}); }

DecisionRule DecisionRule::mixture(std::vector<double> weights, std::vector<DecisionRule> components) {
  if (weights.empty() || weights.size() != components.size()) {
    throw Error(ErrorCode::InvalidArgument, "mixture needs one weight per component and at least one component");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "mixture weights must be >= 0");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "mixture weights must sum to 1");
  return DecisionRule(Mixture{std::move(weights), std::move(components)});
}

DecisionRule DecisionRule::plug_in(StudySet study) { return DecisionRule(PlugIn{std::move(study)}); }

double evaluate(const DecisionRule& rule, double index) {
  if (!std::isfinite(index)) throw Error(ErrorCode::NonFiniteInput, "rule index must be finite");
  return std::visit(overloaded{
                        [&](const Threshold& r) { return index >= r.c ? 1.0 : 0.0; },
                        [&](const Linear& r) {
                          if (index < -r.rho) return 0.0;
                          if (index > r.rho) return 1.0;
                          return (index + r.rho) / (2.0 * r.rho);
                        },
                        [&](const RtSmooth& r) { return std_normal_cdf(index / r.sigma_tilde); },
                        [](const CoinFlip&) { return 0.5; },
                        [](const NoData&) { return 0.0; },
                        [&](const Mixture& r) {
                          double sum = 0.0;
                          for (std::size_t i = 0; i < r.weights.size(); ++i) {
                            sum += r.weights[i] * evaluate(r.components[i], index);
                          }
                          return sum;
                        },
                        [](const PlugIn&) -> double {
                          throw Error(ErrorCode::UnsupportedRule, "plug-in rule needs the full data vector");
                        },
                    },
                    rule.kind());
}

PlugInAction plug_in_action(const StudySet& study, const Eigen::VectorXd& y) {
  const WelfareBounds b = estimated_bounds(study, y);
  if (b.upper < 0.0) return {0.0, false};
  if (b.lower > 0.0) return {1.0, false};
  const double width = b.upper - b.lower;
  if (!(width > 0.0)) return {b.upper >= 0.0 ? 1.0 : 0.0, true};
  return {clamp01(b.upper / width), false};
}

double evaluate_on_data(const DecisionRule& rule, const StudySet& study, const Eigen::VectorXd& y) {
  if (static_cast<std::size_t>(y.size()) != study.size()) {
    throw Error(ErrorCode::DimensionMismatch, "data vector length differs from the study");
  }
  if (const auto* p = rule.as<PlugIn>()) return plug_in_action(p->study, y).action;
  if (const auto* m = rule.as<Mixture>()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      sum += m->weights[i] * evaluate_on_data(m->components[i], study, y);
    }
    return sum;
  }
  return evaluate(rule, index_weights(rule, study.size()).dot(y));
}

double adoption_probability(const DecisionRule& rule, double gamma, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  if (!std::isfinite(gamma)) throw Error(ErrorCode::NonFiniteInput, "gamma must be finite");
  return std::visit(
      overloaded{
          [&](const Threshold& r) { return std_normal_cdf((gamma - r.c) / sigma); },
          [&](const Linear& r) {
            const double rho = r.rho;
            const double upper = (rho - gamma) / sigma;
            const double lower = (-rho - gamma) / sigma;
            const double p = std_normal_cdf((gamma - rho) / sigma) +
                             sigma / (2.0 * rho) * (std_normal_pdf((rho + gamma) / sigma) - std_normal_pdf(upper)) +
                             (gamma + rho) / (2.0 * rho) * (std_normal_cdf(upper) - std_normal_cdf(lower));
            return clamp01(p);
          },
          [&](const RtSmooth& r) {
            return std_normal_cdf(gamma / std::hypot(r.sigma_tilde, sigma));
          },
          [](const CoinFlip&) { return 0.5; },
          [](const NoData&) { return 0.0; },
          [&](const Mixture& r) {
            double sum = 0.0;
            for (std::size_t i = 0; i < r.weights.size(); ++i) {
              sum += r.weights[i] * adoption_probability(r.components[i], gamma, sigma);
            }
            return sum;
          },
          [](const PlugIn&) -> double {
            throw Error(ErrorCode::UnsupportedRule, "plug-in rule has no scalar-index adoption probability");
          },
      },
      rule.kind());
}

bool is_scalar_index(const DecisionRule& rule) {
  if (rule.as<PlugIn>()) return false;
  if (const auto* m = rule.as<Mixture>()) {
    for (const auto& c : m->components) {
      if (!is_scalar_index(c)) return false;
    }
  }
  return true;
}

bool is_symmetric(const DecisionRule& rule) {
  return std::visit(overloaded{
                        [](const Threshold& r) { return r.c == 0.0; },
                        [](const Linear&) { return true; },
                        [](const RtSmooth&) { return true; },
                        [](const CoinFlip&) { return true; },
                        [](const NoData&) { return false; },
                        [](const Mixture& r) {
                          for (const auto& c : r.components) {
                            if (!is_symmetric(c)) return false;
                          }
                          return true;
                        },
                        [](const PlugIn&) { return false; },
                    },
                    rule.kind());
}

bool is_monotone(const DecisionRule& rule) {
  if (rule.as<PlugIn>()) return false;
  if (const auto* m = rule.as<Mixture>()) {
    for (const auto& c : m->components) {
      if (!is_monotone(c)) return false;
    }
  }
  return true;
}

Eigen::VectorXd index_weights(const DecisionRule& rule, std::size_t n) {
  if (rule.as<PlugIn>() || rule.as<Mixture>()) {
    throw Error(ErrorCode::UnsupportedRule, "rule has no single index weight vector");
  }
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  e1(0) = 1.0;
  if (const auto* t = rule.as<Threshold>(); t && t->w.size() > 0) {
    if (static_cast<std::size_t>(t->w.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "threshold weights do not match the study size");
    }
    return t->w;
  }
  return e1;
}

bool uses_nearest_neighbor_index(const DecisionRule& rule) {
  if (rule.as<PlugIn>()) return false;
  if (const auto* t = rule.as<Threshold>()) return is_unit_first(t->w);
  if (const auto* m = rule.as<Mixture>()) {
    for (const auto& c : m->components) {
      if (!uses_nearest_neighbor_index(c)) return false;
    }
  }
  return true;
}

bool RandomizationRegion::contains(const RandomizationRegion& other) const {
  if (other.empty()) return true;
  if (empty()) return false;
  return lower <= other.lower && other.upper <= upper;
}

bool RandomizationRegion::strictly_contains(const RandomizationRegion& other) const {
  return contains(other) && !(lower == other.lower && upper == other.upper) && !empty();
}

namespace {

// Edges of {t : d(t) = 0} and {t : d(t) = 1} for a nondecreasing rule.
struct Edges {
  double zero_end;
  double one_start;
};

Edges edges(const DecisionRule& rule) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(overloaded{
                        [](const Threshold& r) { return Edges{r.c, r.c}; },
                        [](const Linear& r) { return Edges{-r.rho, r.rho}; },
                        [](const RtSmooth&) { return Edges{-inf, inf}; },
                        [](const CoinFlip&) { return Edges{-inf, inf}; },
                        [](const NoData&) { return Edges{inf, inf}; },
                        [](const Mixture& r) {
                          Edges e{inf, -inf};
                          for (std::size_t i = 0; i < r.weights.size(); ++i) {
                            if (r.weights[i] <= 0.0) continue;
                            const Edges c = edges(r.components[i]);
                            e.zero_end = std::min(e.zero_end, c.zero_end);
                            e.one_start = std::max(e.one_start, c.one_start);
                          }
                          return e;
                        },
                        [](const PlugIn&) -> Edges {
                          throw Error(ErrorCode::UnsupportedRule, "plug-in rule has no index randomization region");
                        },
                    },
                    rule.kind());
}

}  // namespace

RandomizationRegion randomization_region(const DecisionRule& rule) {
  const Edges e = edges(rule);
  if (!(e.zero_end < e.one_start)) return {};
  return {e.zero_end, e.one_start};
}

std::string rule_label(const DecisionRule& rule) {
  return std::visit(overloaded{
                        [](const Threshold& r) -> std::string {
                          return r.c == 0.0 && is_unit_first(r.w) ? "d_threshold0" : "d_threshold";
                        },
                        [](const Linear&) -> std::string { return "d_linear"; },
                        [](const RtSmooth&) -> std::string { return "d_rt"; },
                        [](const CoinFlip&) -> std::string { return "d_coinflip"; },
                        [](const NoData&) -> std::string { return "d_nodata"; },
                        [](const Mixture&) -> std::string { return "d_mixture"; },
                        [](const PlugIn&) -> std::string { return "d_plugin"; },
                    },
                    rule.kind());
}

}  // namespace mmrkit
