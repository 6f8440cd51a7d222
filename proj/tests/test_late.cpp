#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "mmrkit/error.hpp"
#include "mmrkit/late.hpp"
#include "oracles.hpp"

using namespace mmrkit;
using oracle::kCells;
using oracle::Range;
using oracle::StepMte;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("closed-form bounds") {
  const WelfareBounds b = late_bounds({0.2, 0.1, 0.4});
  CHECK(std::abs(b.lower - (1.0 / 6.0 - 0.25 - 1.0 / 3.0)) < 1e-15);
  CHECK(std::abs(b.upper - (1.0 / 6.0 - 0.25 + 1.0 / 3.0)) < 1e-15);
  CHECK(std::abs(b.lower + 0.41667) < 1e-5);
  CHECK(std::abs(b.upper - 0.25) < 1e-9);

  const WelfareBounds z = late_bounds({0.3, 0.0, 0.5});
  CHECK(z.lower == doctest::Approx(-0.3 / 0.8));
  CHECK(z.upper == doctest::Approx(0.3 / 0.8));

  CHECK(code_of([] { late_bounds({0.2, 0.0, 0.0}); }) == ErrorCode::DegenerateFirstStage);
  CHECK(code_of([] { late_bounds({0.2, 0.5, 0.4}); }) == ErrorCode::InfeasibleInputs);
  CHECK(code_of([] { late_bounds({0.2, 0.1, 0.9}); }) == ErrorCode::InfeasibleInputs);
  CHECK(code_of([] { late_bounds({0.0, 0.1, 0.4}); }) == ErrorCode::InfeasibleInputs);
  CHECK(code_of([] { late_bounds({1.0, 0.0, 0.0}); }) == ErrorCode::InfeasibleInputs);
}

TEST_CASE("nontrivial identification") {
  CHECK(late_nontrivial({0.2, 0.1, 0.4}));
  CHECK(late_nontrivial({0.2, 0.0, 0.1}));
  CHECK(late_nontrivial({0.5, 0.0, 0.5}));
  // |mu1| = mu2: one end of the set sits exactly at zero.
  const WelfareBounds edge = late_bounds({0.2, 0.4, 0.4});
  CHECK(std::abs(edge.upper) < 1e-15);
  CHECK(std::abs(edge.lower + 2.0 / 3.0) < 1e-15);
  CHECK_FALSE(late_nontrivial({0.2, 0.4, 0.4}));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double alpha = 0.01 + 0.98 * u(rng);
    const double mu2 = (1.0 - alpha) * (0.001 + 0.999 * u(rng));
    const double mu1 = mu2 * (2.0 * u(rng) - 1.0) * 0.999;
    CHECK(late_nontrivial({alpha, mu1, mu2}));
  }
}

TEST_CASE("centrosymmetry") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double alpha = 0.01 + 0.98 * u(rng);
    const double mu2 = (1.0 - alpha) * (0.01 + 0.99 * u(rng));
    const double mu1 = mu2 * (2.0 * u(rng) - 1.0);
    const WelfareBounds a = late_bounds({alpha, mu1, mu2});
    const WelfareBounds b = late_bounds({alpha, -mu1, mu2});
    CHECK(std::abs(a.lower + b.upper) < 1e-14);
    CHECK(std::abs(a.upper + b.lower) < 1e-14);
    CHECK(a.lower <= a.upper);
  }
}

TEST_CASE("bounds reproduce a brute-force scan over step-function MTE") {
  const Range r = oracle::late_brute_force(0.2, 0.1, 0.4);
  const WelfareBounds b = late_bounds({0.2, 0.1, 0.4});
  CHECK(std::abs(r.lo - b.lower) < 5e-3);
  CHECK(std::abs(r.hi - b.upper) < 5e-3);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double alpha = 0.05 + 0.6 * u(rng);
    const double mu2 = (1.0 - alpha) * (0.1 + 0.8 * u(rng));
    const double mu1 = mu2 * (1.6 * u(rng) - 0.8);
    const Range s = oracle::late_brute_force(alpha, mu1, mu2);
    const WelfareBounds c = late_bounds({alpha, mu1, mu2});
    CHECK(std::abs(s.lo - c.lower) < 5e-3);
    CHECK(std::abs(s.hi - c.upper) < 5e-3);
  }
}

TEST_CASE("welfare contrast") {
  for (double tau : {-0.7, 0.0, 0.3, 1.0}) {
    CHECK(std::abs(late_welfare_contrast(0.2, 0.1, 0.5, [tau](double) { return tau; })) < 1e-12);
  }
  // MTE = 1{v > p1}: only the extrapolated segment contributes.
  const double alpha = 0.25, p0 = 0.1, p1 = 0.45;
  const double breaks[] = {p1};
  const double u = late_welfare_contrast(alpha, p0, p1, [&](double v) { return v > p1 ? 1.0 : 0.0; }, breaks);
  CHECK(std::abs(u - alpha / (alpha + (p1 - p0))) < 1e-12);

  const auto smooth = [](double v) { return std::sin(6.0 * v) * 0.9; };
  const double direct = (std::cos(6.0 * p0) - std::cos(6.0 * (p1 + alpha))) * 0.9 / 6.0 / (alpha + p1 - p0) -
                        (std::cos(6.0 * p0) - std::cos(6.0 * p1)) * 0.9 / 6.0 / (p1 - p0);
  CHECK(std::abs(late_welfare_contrast(alpha, p0, p1, smooth) - direct) < 1e-10);

  CHECK(code_of([] { late_welfare_contrast(0.2, 0.3, 0.3, [](double) { return 0.0; }); }) ==
        ErrorCode::DegenerateFirstStage);
  CHECK(code_of([] { late_welfare_contrast(0.2, 0.5, 0.3, [](double) { return 0.0; }); }) ==
        ErrorCode::InfeasiblePropensities);
  CHECK(code_of([] { late_welfare_contrast(0.3, 0.1, 0.8, [](double) { return 0.0; }); }) ==
        ErrorCode::InfeasiblePropensities);
  CHECK(code_of([] { late_welfare_contrast(0.2, -0.1, 0.3, [](double) { return 0.0; }); }) ==
        ErrorCode::InfeasiblePropensities);
}

TEST_CASE("contrasts of feasible designs lie inside the bounds") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double alpha = 0.05 + 0.5 * u(rng);
    const double p0 = (1.0 - alpha) * 0.5 * u(rng);
    const double p1 = p0 + (1.0 - alpha - p0) * (0.05 + 0.95 * u(rng));
    StepMte mte;
    for (double& v : mte.value) v = 2.0 * u(rng) - 1.0;
    std::vector<double> breaks;
    for (int c = 1; c < kCells; ++c) breaks.push_back(double(c) / kCells);
    const double got = late_welfare_contrast(alpha, p0, p1, mte, breaks);
    CHECK(std::abs(got - oracle::late_contrast(mte, alpha, p0, p1)) < 1e-9);
    const WelfareBounds b = late_bounds({alpha, mte.integral(p0, p1), p1 - p0});
    CHECK(got >= b.lower - 1e-9);
    CHECK(got <= b.upper + 1e-9);
  }
}
