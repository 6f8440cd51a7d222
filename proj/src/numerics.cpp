#include "mmrkit/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "mmrkit/error.hpp"

namespace mmrkit {

void Tolerance::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1) {
    throw Error(ErrorCode::InvalidArgument, "tolerance requires abs_tol > 0, rel_tol > 0, max_iter >= 1");
  }
}

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(-x * (1.0 / std::numbers::sqrt2));
}

double std_normal_central_mass(double x) { return std::erf(x * (1.0 / std::numbers::sqrt2)); }

namespace {

bool opposite_or_zero(double a, double b) { return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0); }

}  // namespace

double find_root(const ScalarFn& f, double lo, double hi, const Tolerance& tol) {
  tol.validate();
  if (lo > hi) std::swap(lo, hi);
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb) || !opposite_or_zero(fa, fb)) {
    throw Error(ErrorCode::NoBracket, "f(lo) and f(hi) do not bracket a root on [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "]");
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  // Illinois regula falsi on odd steps, plain bisection on even steps, so the
  // bracket at least halves every two iterations.
  int side = 0;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    double x;
    if (iter % 2 == 0) {
      x = b - fb * (b - a) / (fb - fa);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
    } else {
      x = 0.5 * (a + b);
    }
    const double fx = f(x);
    if (fx == 0.0 || std::abs(fx) <= tol.abs_tol) return x;
    if (opposite_or_zero(fa, fx)) {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == +1) fb *= 0.5;
      side = +1;
    }
    const double mid = 0.5 * (a + b);
    if (b - a <= tol.rel_tol * (1.0 + std::abs(mid))) return mid;
  }
  throw Error(ErrorCode::NoConvergence, "find_root exceeded " + std::to_string(tol.max_iter) + " iterations");
}

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const ScalarFn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, const Tolerance& tol) {
  tol.validate();
  if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
    throw Error(ErrorCode::InvalidInterval, "integrate requires finite a <= b");
  }
  if (a == b) return 0.0;

  std::priority_queue<Segment> work;
  Segment first = gauss_kronrod(f, a, b);
  double total = first.value;
  double error = first.error;
  work.push(first);
  const std::size_t budget = 50 * static_cast<std::size_t>(tol.max_iter);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  while (error > std::max(tol.abs_tol, tol.rel_tol * std::abs(total))) {
    if (work.size() >= budget) {
      throw Error(ErrorCode::NoConvergence, "integrate exhausted its subdivision budget");
    }
    Segment worst = work.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || worst.error <= 50.0 * eps * std::abs(worst.value)) {
      // Interval can no longer be split meaningfully; accept the current estimate.
      break;
    }
    work.pop();
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  double sum = 0.0;
  while (!work.empty()) {
    sum += work.top().value;
    work.pop();
  }
  return sum;
}

double integrate_piecewise(const ScalarFn& f, double a, double b, std::span<const double> breaks,
                           const Tolerance& tol) {
  std::vector<double> cuts{a};
  for (double x : breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate(f, cuts[i], cuts[i + 1], tol);
  return sum;
}

namespace {

double safe_eval(const ScalarFn& f, double x) {
  const double v = f(x);
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

}  // namespace

ScalarMax maximize_scalar(const ScalarFn& f, double lo, double hi, int grid_n, const Tolerance& tol) {
  tol.validate();
  if (!(lo < hi)) throw Error(ErrorCode::InvalidInterval, "maximize_scalar requires lo < hi");
  if (grid_n < 16) throw Error(ErrorCode::InvalidArgument, "maximize_scalar requires grid_n >= 16");

  const auto grid = linspace(lo, hi, static_cast<std::size_t>(grid_n));
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = safe_eval(f, grid[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  constexpr double inv_phi = 0.61803398874989484820;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = safe_eval(f, x1);
  double f2 = safe_eval(f, x2);
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if (b - a <= tol.abs_tol + tol.rel_tol * (std::abs(a) + std::abs(b))) break;
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = safe_eval(f, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = safe_eval(f, x2);
    }
  }

  ScalarMax result{grid[best], best_value};
  const double xr = f1 >= f2 ? x1 : x2;
  const double fr = std::max(f1, f2);
  if (fr > result.max) result = {xr, fr};
  return result;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "linspace requires n >= 2");
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

}  // namespace mmrkit
