#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tsallis/bounds.hpp"
#include "tsallis/verification.hpp"

using namespace tsallis;

TEST_CASE("lemma suite passes at reduced size") {
  LemmaSuiteOptions opts;
  opts.trials = 20;
  for (const auto& r : run_lemma_suite(opts)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
    CHECK(r.failures == 0);
  }
}

TEST_CASE("suite is deterministic for a seed") {
  const auto a = check_quadratic_lemma(50, 1);
  const auto b = check_quadratic_lemma(50, 1);
  CHECK(a.worst == b.worst);
  CHECK(a.detail == b.detail);
}

TEST_CASE("quadratic oracle agrees with the 1-D grid") {
  for (double m : {0.1, 0.7, 3.0}) {
    const std::vector<double> c{1.7};
    CHECK(quadratic_max_oracle(2.3, c, m) ==
          doctest::Approx(quadratic_max_grid_1d(2.3, 1.7, m, -3.0, 3.0, 1e-5)).epsilon(1e-8));
  }
}

TEST_CASE("quadratic oracle on the boundary") {
  // Symmetric costs: optimum splits the budget evenly.
  const std::vector<double> c{2.0, 2.0, 2.0};
  const double v = quadratic_max_oracle(6.0, c, 1.5);
  CHECK(v == doctest::Approx(3 * (6.0 * 0.5 - 2.0 * 0.25)));
  CHECK(v == doctest::Approx(lemma_opt_solve(6.0, c, 1.5).value));
}

TEST_CASE("bisection W_{-1} oracle") {
  CHECK(lambert_w_minus1_bisection(-1.0 / std::numbers::e) == doctest::Approx(-1.0).epsilon(1e-8));
  const double w = lambert_w_minus1_bisection(-1e-10);
  CHECK(w * std::exp(w) == doctest::Approx(-1e-10).epsilon(1e-10));
}
