#pragma once

// Numeric oracle suites behind `tsallis verify-lemmas`. Each oracle is an
// independent computation (grid search, elimination, bisection) checked
// against the closed forms in bounds.hpp.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsallis {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest error / violation observed
  std::string detail;
};

struct LemmaSuiteOptions {
  std::uint64_t seed = 20240601;
  // Overrides every per-check instance count when set.
  std::optional<std::size_t> trials;
};

// Quadratic-budget lemma vs. oracle (relative error <= 1e-6) and its final
// inequality.
CheckResult check_quadratic_lemma(std::size_t instances, std::uint64_t seed);
// Finite sum vs. 2/c on random valid (b, c, T0, T).
CheckResult check_corollary_sum(std::size_t instances, std::uint64_t seed);
// Lambert two-sided bound on random x in (0,1] and W_{-1}(-1/e) = -1.
CheckResult check_lambert(std::size_t instances, std::uint64_t seed);
// alpha* stationarity residual <= 1e-8 and grid minimality of f within 1e-9.
CheckResult check_alpha_star(std::size_t instances, std::uint64_t seed);

std::vector<CheckResult> run_lemma_suite(const LemmaSuiteOptions& options = {});

// -- Oracles ------------------------------------------------------------------

// max sum_i (b x_i - c_i x_i^2) s.t. sum_i x_i <= M by enumeration of the
// interior and boundary candidates (boundary via elimination and a dense
// linear solve).
double quadratic_max_oracle(double b, std::span<const double> c, double m);

// 1-D brute force: best value of b x - c x^2 over a grid on the feasible part
// [lo, min(hi, M)] with the given step, endpoints included.
double quadratic_max_grid_1d(double b, double c, double m, double lo, double hi, double step);

// W_{-1}(y) by plain bisection on w e^w - y in extended precision.
double lambert_w_minus1_bisection(double y);

}  // namespace tsallis
