#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "mmrkit/identified_set.hpp"

namespace mmrkit {

class DecisionRule;

/// 1{w'y >= c}. An empty `w` means the nearest-neighbor index y_1.
struct Threshold {
  Eigen::VectorXd w;
  double c = 0.0;
};

/// Piecewise linear ramp from 0 at index -rho to 1 at index +rho.
struct Linear {
  double rho;
};

/// Phi(index / sigma_tilde).
struct RtSmooth {
  double sigma_tilde;
};

struct CoinFlip {};
struct NoData {};

struct Mixture {
  std::vector<double> weights;
  std::vector<DecisionRule> components;
};

/// Adopt in proportion to where zero falls inside the estimated identified
/// set, computed from the constrained MLE of mu.
struct PlugIn {
  StudySet study;
};

/// Maps data to an action in [0,1]. Every kind except PlugIn acts on a
/// scalar index of the data; Linear and RtSmooth always use y_1.
class DecisionRule {
 public:
  using Kind = std::variant<Threshold, Linear, RtSmooth, CoinFlip, NoData, Mixture, PlugIn>;

  static DecisionRule threshold(double c = 0.0, Eigen::VectorXd w = {});
  static DecisionRule linear(double rho);
  static DecisionRule rt_smooth(double sigma_tilde);
  static DecisionRule coin_flip();
  static DecisionRule no_data();
  static DecisionRule mixture(std::vector<double> weights, std::vector<DecisionRule> components);
  static DecisionRule plug_in(StudySet study);

  const Kind& kind() const { return kind_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }

 private:
  explicit DecisionRule(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// Action at a scalar index value.
double evaluate(const DecisionRule& rule, double index);

/// Action on a full data vector (sorted study order). Scalar-index rules are
/// evaluated at w'y with their own index weights.
double evaluate_on_data(const DecisionRule& rule, const StudySet& study, const Eigen::VectorXd& y);

struct PlugInAction {
  double action;
  /// The estimated interval collapsed to a point; action is then 1{upper >= 0}.
  bool degenerate;
};

PlugInAction plug_in_action(const StudySet& study, const Eigen::VectorXd& y);

/// E[d(T)] for T ~ N(gamma, sigma^2), in closed form.
double adoption_probability(const DecisionRule& rule, double gamma, double sigma);

/// False for PlugIn and for mixtures that contain one.
bool is_scalar_index(const DecisionRule& rule);

/// True if d(-t) = 1 - d(t) holds on the index.
bool is_symmetric(const DecisionRule& rule);

/// True when the rule is nondecreasing in its index.
bool is_monotone(const DecisionRule& rule);

/// Index weights of a scalar-index rule in sorted study order (e_1 unless a
/// Threshold carries its own). Throws UnsupportedRule for PlugIn/Mixture.
Eigen::VectorXd index_weights(const DecisionRule& rule, std::size_t n);

/// True when the rule's index is the nearest-neighbor signal y_1.
bool uses_nearest_neighbor_index(const DecisionRule& rule);

/// Open interval of index values at which the rule takes interior actions:
/// (sup{t : d(t) = 0}, inf{t : d(t) = 1}).
struct RandomizationRegion {
  double lower = std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();

  bool empty() const { return !(lower < upper); }
  bool contains(const RandomizationRegion& other) const;
  bool strictly_contains(const RandomizationRegion& other) const;
};

RandomizationRegion randomization_region(const DecisionRule& rule);

/// Column/series name used in CSV output, e.g. "d_linear".
std::string rule_label(const DecisionRule& rule);

}  // namespace mmrkit
