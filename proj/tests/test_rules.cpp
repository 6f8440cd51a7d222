#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "mmrkit/error.hpp"
#include "mmrkit/mmr.hpp"
#include "mmrkit/numerics.hpp"
#include "mmrkit/rules.hpp"
#include "oracles.hpp"

using namespace mmrkit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("rule evaluation") {
  const DecisionRule lin = DecisionRule::linear(2.0);
  CHECK(evaluate(lin, 0.0) == 0.5);
  CHECK(evaluate(lin, 3.0) == 1.0);
  CHECK(evaluate(lin, -3.0) == 0.0);
  CHECK(evaluate(lin, 1.0) == 0.75);
  CHECK(std::abs(evaluate(DecisionRule::rt_smooth(14.442), 14.442) - 0.8413) < 1e-4);
  CHECK(evaluate(DecisionRule::threshold(0.0), 0.0) == 1.0);
  CHECK(evaluate(DecisionRule::threshold(0.0), -1e-300) == 0.0);
  CHECK(evaluate(DecisionRule::coin_flip(), 123.0) == 0.5);
  CHECK(evaluate(DecisionRule::no_data(), 123.0) == 0.0);
  CHECK(code_of([&] { evaluate(lin, kInf); }) == ErrorCode::NonFiniteInput);
  CHECK(code_of([&] { evaluate(lin, NAN); }) == ErrorCode::NonFiniteInput);
}

TEST_CASE("rule construction validates parameters") {
  CHECK(code_of([] { DecisionRule::linear(0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { DecisionRule::rt_smooth(-1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { DecisionRule::mixture({0.5, 0.6}, {DecisionRule::coin_flip(), DecisionRule::no_data()}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { DecisionRule::mixture({-0.5, 1.5}, {DecisionRule::coin_flip(), DecisionRule::no_data()}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { DecisionRule::mixture({1.0}, {}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { DecisionRule::threshold(0.0, vec({0.0, 0.0})); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("mixture evaluation is affine") {
  const DecisionRule a = DecisionRule::linear(3.0);
  const DecisionRule b = DecisionRule::rt_smooth(2.0);
  const DecisionRule m = DecisionRule::mixture({0.3, 0.7}, {a, b});
  for (double t = -6.0; t <= 6.0; t += 0.37) {
    CHECK(evaluate(m, t) == 0.3 * evaluate(a, t) + 0.7 * evaluate(b, t));
    CHECK(adoption_probability(m, t, 1.3) ==
          doctest::Approx(0.3 * adoption_probability(a, t, 1.3) + 0.7 * adoption_probability(b, t, 1.3)));
  }
}

TEST_CASE("adoption probability examples") {
  for (const auto& r : {DecisionRule::threshold(0.0), DecisionRule::linear(1.7), DecisionRule::rt_smooth(2.2),
                        DecisionRule::coin_flip()}) {
    CHECK(std::abs(adoption_probability(r, 0.0, 1.4) - 0.5) < 1e-12);
  }
  CHECK(std::abs(adoption_probability(DecisionRule::threshold(0.0), 2.5, 2.5) - std_normal_cdf(1.0)) < 1e-15);
  CHECK(std::abs(adoption_probability(DecisionRule::threshold(0.0), 2.5, 2.5) - 0.8413) < 1e-4);

  const double rho = solve_rho_star(18.75, 3.9);
  const DecisionRule lin = DecisionRule::linear(rho);
  CHECK(std::abs(adoption_probability(lin, 0.0, 3.9) - 0.5) < 1e-9);
  const double tail = integrate([&](double x) { return std_normal_cdf((2 * rho * x - rho - 10.0) / 3.9); }, 0.0, 1.0,
                                Tolerance{1e-14, 1e-14, 400});
  CHECK(std::abs(adoption_probability(lin, 10.0, 3.9) - (1.0 - tail)) < 1e-8);
  CHECK(adoption_probability(DecisionRule::no_data(), 3.0, 1.0) == 0.0);

  const StudySet s({1.0}, 0.0, {1.0}, 1.0);
  CHECK(code_of([&] { adoption_probability(DecisionRule::plug_in(s), 0.0, 1.0); }) == ErrorCode::UnsupportedRule);
  CHECK(code_of([&] { adoption_probability(lin, 0.0, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("closed forms match quadrature on a (gamma, sigma) grid") {
  const DecisionRule rules[] = {
      DecisionRule::threshold(0.0),  DecisionRule::threshold(1.3),
      DecisionRule::linear(18.75),   DecisionRule::linear(0.4),
      DecisionRule::rt_smooth(14.4), DecisionRule::rt_smooth(0.3),
      DecisionRule::coin_flip(),     DecisionRule::no_data(),
      DecisionRule::mixture({0.5, 0.5}, {DecisionRule::linear(2.0), DecisionRule::threshold(-1.0)})};
  const std::vector<double> kinks{0.0, 1.3, 18.75, -18.75, 0.4, -0.4, 2.0, -2.0, -1.0};
  double worst = 0.0;
  for (const auto& r : rules) {
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double gamma = -25.0 + 50.0 * i / 9.0;
        const double sigma = 0.5 + j * 1.0;
        worst = std::max(worst, std::abs(adoption_probability(r, gamma, sigma) - oracle::adoption(r, gamma, sigma, kinks)));
      }
    }
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("symmetry and monotonicity of adoption probabilities") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> g(-30.0, 30.0), s(0.1, 8.0);
  const DecisionRule sym[] = {DecisionRule::threshold(0.0), DecisionRule::linear(4.0), DecisionRule::rt_smooth(3.0),
                              DecisionRule::coin_flip(),
                              DecisionRule::mixture({0.25, 0.75}, {DecisionRule::linear(4.0), DecisionRule::rt_smooth(3.0)})};
  for (const auto& r : sym) {
    CHECK(is_symmetric(r));
    for (int i = 0; i < 200; ++i) {
      const double gamma = g(rng), sigma = s(rng);
      CHECK(std::abs(adoption_probability(r, gamma, sigma) + adoption_probability(r, -gamma, sigma) - 1.0) < 1e-9);
    }
    double prev = -1.0;
    for (double gamma : linspace(-40.0, 40.0, 1000)) {
      const double p = adoption_probability(r, gamma, 2.0);
      CHECK(p >= prev - 1e-15);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      prev = p;
    }
  }
  CHECK_FALSE(is_symmetric(DecisionRule::threshold(0.5)));
  CHECK_FALSE(is_symmetric(DecisionRule::no_data()));
}

TEST_CASE("randomization regions") {
  CHECK(randomization_region(DecisionRule::threshold(0.0)).empty());
  const RandomizationRegion lin = randomization_region(DecisionRule::linear(2.0));
  CHECK(lin.lower == -2.0);
  CHECK(lin.upper == 2.0);
  const RandomizationRegion rt = randomization_region(DecisionRule::rt_smooth(1.0));
  CHECK(rt.lower == -kInf);
  CHECK(rt.upper == kInf);
  CHECK(randomization_region(DecisionRule::coin_flip()).upper == kInf);
  CHECK(randomization_region(DecisionRule::no_data()).empty());

  const RandomizationRegion mix =
      randomization_region(DecisionRule::mixture({0.5, 0.5}, {DecisionRule::linear(1.0), DecisionRule::threshold(3.0)}));
  CHECK(mix.lower == -1.0);
  CHECK(mix.upper == 3.0);
  // The mixed action is interior on the whole region and 0/1 outside.
  for (double t : {-0.99, 0.0, 2.0, 2.99}) {
    const double a = evaluate(DecisionRule::mixture({0.5, 0.5}, {DecisionRule::linear(1.0), DecisionRule::threshold(3.0)}), t);
    CHECK(a > 0.0);
    CHECK(a < 1.0);
  }

  const double k = 18.75, s = 3.9;
  const RandomizationRegion vl = randomization_region(DecisionRule::linear(solve_rho_star(k, s)));
  const RandomizationRegion vr = randomization_region(DecisionRule::rt_smooth(sigma_tilde(k, s)));
  CHECK(vr.strictly_contains(vl));
  CHECK_FALSE(vl.contains(vr));
  CHECK(vl.contains(randomization_region(DecisionRule::threshold(0.0))));

  const StudySet study({1.0}, 0.0, {1.0}, 1.0);
  CHECK(code_of([&] { randomization_region(DecisionRule::plug_in(study)); }) == ErrorCode::UnsupportedRule);
}

TEST_CASE("plug-in rule on data") {
  const StudySet one({1.0}, 0.0, {1.0}, 2.0);
  const DecisionRule p = DecisionRule::plug_in(one);
  CHECK(evaluate_on_data(p, one, vec({5.0})) == 1.0);
  CHECK(evaluate_on_data(p, one, vec({0.0})) == 0.5);
  CHECK(evaluate_on_data(p, one, vec({-5.0})) == 0.0);
  CHECK(evaluate_on_data(p, one, vec({1.0})) == doctest::Approx(0.75));
  CHECK(code_of([&] { evaluate_on_data(p, one, vec({1.0, 2.0})); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { evaluate(p, 0.0); }) == ErrorCode::UnsupportedRule);

  // Two signals at the edge of M on either side of x0 pin the target to a point.
  const StudySet two({-1.0, 1.5}, 0.0, {1.0, 1.0}, 1.0);
  const PlugInAction edge = plug_in_action(two, vec({-1.0, 1.5}));
  CHECK(edge.degenerate);
  CHECK(edge.action == 1.0);
  CHECK_FALSE(plug_in_action(two, vec({0.0, 2.5})).degenerate);
  CHECK(plug_in_action(two, vec({0.0, 2.5})).action == 1.0);
  CHECK(plug_in_action(two, vec({-3.0, -1.0})).action == 0.0);
  CHECK_FALSE(plug_in_action(two, vec({0.0, 0.0})).degenerate);

  // Scalar-index rules use the nearest signal after sorting.
  const StudySet fig({7.9, -7.5}, 0.0, {2.4, 3.9}, 2.5);
  CHECK(evaluate_on_data(DecisionRule::linear(2.0), fig, vec({1.0, -100.0})) == 0.75);
  CHECK(evaluate_on_data(DecisionRule::threshold(0.0, vec({1.0, 1.0})), fig, vec({-1.0, 2.0})) == 1.0);
  CHECK(evaluate_on_data(DecisionRule::mixture({0.5, 0.5}, {DecisionRule::coin_flip(), p}), one, vec({5.0})) == 0.75);
}

TEST_CASE("index conventions and labels") {
  CHECK(uses_nearest_neighbor_index(DecisionRule::linear(1.0)));
  CHECK(uses_nearest_neighbor_index(DecisionRule::threshold(0.0, vec({1.0, 0.0}))));
  CHECK_FALSE(uses_nearest_neighbor_index(DecisionRule::threshold(0.0, vec({1.0, 0.5}))));
  CHECK(index_weights(DecisionRule::rt_smooth(1.0), 3) == vec({1.0, 0.0, 0.0}));
  CHECK(code_of([] { index_weights(DecisionRule::threshold(0.0, vec({1.0, 0.5})), 3); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(rule_label(DecisionRule::threshold(0.0)) == "d_threshold0");
  CHECK(rule_label(DecisionRule::threshold(0.5)) == "d_threshold");
  CHECK(rule_label(DecisionRule::linear(1.0)) == "d_linear");
  CHECK(rule_label(DecisionRule::rt_smooth(1.0)) == "d_rt");
  CHECK(rule_label(DecisionRule::coin_flip()) == "d_coinflip");
  const StudySet one({1.0}, 0.0, {1.0}, 2.0);
  CHECK_FALSE(is_scalar_index(DecisionRule::plug_in(one)));
  CHECK_FALSE(is_monotone(DecisionRule::plug_in(one)));
  CHECK(is_monotone(DecisionRule::linear(1.0)));
}
