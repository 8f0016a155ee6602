#include "tsallis/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tsallis/bounds.hpp"
#include "tsallis/random.hpp"

namespace tsallis {
namespace {

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// (0, 10], never exactly zero.
double positive_upto_ten(Rng& rng) { return 10.0 * (1.0 - uniform01(rng)); }

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform_in(rng, std::log(lo), std::log(hi)));
}

double quadratic_objective(double b, std::span<const double> c, std::span<const double> x) {
  double v = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) v += b * x[i] - c[i] * x[i] * x[i];
  return v;
}

// Gaussian elimination with partial pivoting; a is n x n row-major.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      for (std::size_t j = col; j < n; ++j) a[r * n + j] -= factor * a[col * n + j];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

// Independent evaluation of the bracketed term of the alpha optimisation.
double f_reference(double alpha, double s, double c, double k1, double t) {
  return (s / alpha) * (3.0 + std::log(t * k1) - 2.0 * std::log(s)) +
         (2.0 * s / alpha) * std::log(alpha) + alpha * c;
}

CheckResult finish(CheckResult r) {
  r.passed = r.failures == 0;
  std::ostringstream os;
  os << r.trials << " instances, " << r.failures << " failures, worst " << r.worst;
  if (!r.detail.empty()) os << "; " << r.detail;
  r.detail = os.str();
  return r;
}

}  // namespace

// -- Oracles ------------------------------------------------------------------

double quadratic_max_grid_1d(double b, double c, double m, double lo, double hi, double step) {
  // Grid over the feasible part [lo, min(hi, M)], both endpoints included.
  const double top = std::min(hi, m);
  double best = -std::numeric_limits<double>::infinity();
  if (top < lo) return best;
  const auto n = static_cast<std::size_t>(std::floor((top - lo) / step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    best = std::max(best, b * x - c * x * x);
  }
  return std::max(best, b * top - c * top * top);
}

double quadratic_max_oracle(double b, std::span<const double> c, double m) {
  const std::size_t n = c.size();
  // Interior candidate: coordinatewise stationary point of a separable
  // concave objective.
  std::vector<double> interior(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    interior[i] = b / (2.0 * c[i]);
    total += interior[i];
  }
  if (total <= m) return quadratic_objective(b, c, interior);

  // Otherwise the maximiser lies on sum x = M. Eliminate x_n = M - sum y and
  // solve the stationarity system (diag(2 c_i) + 2 c_n 11^T) y = 2 c_n M 1.
  if (n == 1) {
    const double x = m;
    return b * x - c[0] * x * x;
  }
  const std::size_t r = n - 1;
  std::vector<double> a(r * r, 2.0 * c[n - 1]);
  for (std::size_t i = 0; i < r; ++i) a[i * r + i] += 2.0 * c[i];
  std::vector<double> rhs(r, 2.0 * c[n - 1] * m);
  const std::vector<double> y = solve_dense(std::move(a), std::move(rhs));
  std::vector<double> x(y);
  double sum_y = 0.0;
  for (double v : y) sum_y += v;
  x.push_back(m - sum_y);
  return quadratic_objective(b, c, x);
}

double lambert_w_minus1_bisection(double y) {
  long double lo = -1.0L;
  while (lo * std::exp(lo) < static_cast<long double>(y)) lo *= 2.0L;
  long double hi = -1.0L;
  // w e^w is decreasing on (-inf, -1]: value at lo >= y >= value at hi.
  for (int i = 0; i < 400 && hi - lo > 0.0L; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid * std::exp(mid) >= static_cast<long double>(y)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// -- Checks -------------------------------------------------------------------

CheckResult check_quadratic_lemma(std::size_t instances, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 11));
  CheckResult r{"quadratic budget lemma (closed form vs oracle)", true, instances, 0, 0.0, {}};
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 8);
    const double b = positive_upto_ten(rng);
    const double m = positive_upto_ten(rng);
    std::vector<double> c(n);
    for (double& ci : c) ci = positive_upto_ten(rng);

    const auto closed = lemma_opt_solve(b, c, m);
    const double oracle = quadratic_max_oracle(b, c, m);
    const double rel = std::abs(closed.value - oracle) / std::max(1e-300, std::abs(oracle));
    r.worst = std::max(r.worst, rel);

    // No feasible perturbation of the reported maximiser does better.
    bool perturbation_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x = closed.maximizer;
      double sum = 0.0;
      for (double& xi : x) {
        xi += uniform_in(rng, -1e-3, 1e-3);
        sum += xi;
      }
      if (sum > m) {
        const double shift = (sum - m) / static_cast<double>(n);
        for (double& xi : x) xi -= shift;
      }
      if (quadratic_objective(b, c, x) > closed.value * (1.0 + 1e-12) + 1e-12) {
        perturbation_ok = false;
      }
    }

    double inv_sum = 0.0;
    for (double ci : c) inv_sum += 1.0 / ci;
    const bool final_inequality =
        b * m - m * m / inv_sum <= 0.25 * b * b * inv_sum * (1.0 + 1e-12) &&
        closed.value <= 0.25 * b * b * inv_sum * (1.0 + 1e-12);
    if (rel > 1e-6 || !perturbation_ok || !final_inequality) ++r.failures;
  }
  return finish(std::move(r));
}

CheckResult check_corollary_sum(std::size_t instances, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 12));
  CheckResult r{"integral corollary sum <= 2/c", true, instances, 0, 0.0, {}};
  for (std::size_t k = 0; k < instances; ++k) {
    const double c = log_uniform(rng, 0.01, 10.0);
    const auto t0 = static_cast<std::uint64_t>(1 + rng() % 2000);
    // b sqrt(T0) >= 2c, sometimes exactly at the boundary.
    const double b_min = 2.0 * c / std::sqrt(static_cast<double>(t0));
    const double b = (k % 5 == 0) ? b_min : b_min * log_uniform(rng, 1.0, 50.0);
    const std::uint64_t t = t0 + 1 + rng() % 20000;
    const auto res = corollary_sum_check(b, c, t0, t);
    r.worst = std::max(r.worst, res.sum * c / 2.0);  // fraction of the bound used
    if (!res.holds) ++r.failures;
  }
  r.detail = "worst = sum / (2/c)";
  return finish(std::move(r));
}

CheckResult check_lambert(std::size_t instances, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 13));
  CheckResult r{"Lambert W_{-1} bracketing", true, instances, 0, 0.0, {}};
  const double at_branch = lambert_w_minus1(-1.0 / std::numbers::e);
  if (std::abs(at_branch + 1.0) > 1e-10) ++r.failures;
  for (std::size_t k = 0; k < instances; ++k) {
    // Mix moderate and very small x.
    const double x = (k % 2 == 0) ? 1.0 - uniform01(rng) : std::exp(-uniform_in(rng, 0.0, 40.0));
    const double y = -x / std::numbers::e;
    const auto [lower, upper] = lambert_bounds(x);
    const double w = -lambert_w_minus1(y);
    const double oracle = -lambert_w_minus1_bisection(y);
    const double err = std::abs(w - oracle) / oracle;
    r.worst = std::max(r.worst, err);
    const double slack = 1e-12 * upper;
    const bool bracketed = lower - slack <= w && w <= upper + slack && lower - slack <= oracle &&
                           oracle <= upper + slack;
    if (!bracketed || err > 1e-9) ++r.failures;
  }
  r.trials += 1;
  r.detail = "includes W(-1/e) = -1; worst = relative gap to bisection oracle";
  return finish(std::move(r));
}

CheckResult check_alpha_star(std::size_t instances, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 14));
  CheckResult r{"alpha* stationarity and grid minimality", true, instances, 0, 0.0, {}};
  std::size_t done = 0;
  while (done < instances) {
    const std::size_t arms = 2 + static_cast<std::size_t>(rng() % 63);
    const double t = std::round(log_uniform(rng, 1e3, 1e7));
    const double b = (rng() % 2 == 0) ? 1.0 : kTsallisB;
    const double k1 = static_cast<double>(arms) - 1.0;
    const double s = log_uniform(rng, 0.5, std::sqrt(k1 * t) / (4.0 * b));
    const auto range = refined_corruption_range(s, arms, t, b);
    if (!(range.lower > 0.0) || range.lower >= range.upper) continue;
    const double c = log_uniform(rng, range.lower, range.upper);
    ++done;

    const auto diag = alpha_star(s, c, arms, t, b);
    const double a = diag.alpha_star;
    const double stationarity = std::log(t * k1 * a * a / (s * s)) - c / s * a * a + 1.0;

    const double lo = s / std::sqrt(t * k1);
    const double hi = 1.0 / b;
    double grid_min = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 10000;
    for (int i = 0; i < kGrid; ++i) {
      const double alpha = lo + (hi - lo) * static_cast<double>(i) / (kGrid - 1);
      grid_min = std::min(grid_min, f_reference(alpha, s, c, k1, t));
    }
    const double at_star = f_reference(a, s, c, k1, t);
    const double excess = at_star - grid_min;
    const bool in_range = a >= lo * (1.0 - 1e-12) && a <= hi * (1.0 + 1e-12);
    r.worst = std::max(r.worst, std::abs(stationarity));
    if (std::abs(stationarity) > 1e-8 || excess > 1e-9 || !in_range || diag.w < 1.0) {
      ++r.failures;
    }
  }
  r.detail = "worst = |stationarity residual|";
  return finish(std::move(r));
}

std::vector<CheckResult> run_lemma_suite(const LemmaSuiteOptions& options) {
  auto n = [&](std::size_t fallback) { return options.trials.value_or(fallback); };
  return {
      check_quadratic_lemma(n(500), options.seed),
      check_corollary_sum(n(100), options.seed),
      check_lambert(n(100), options.seed),
      check_alpha_star(n(50), options.seed),
  };
}

}  // namespace tsallis
