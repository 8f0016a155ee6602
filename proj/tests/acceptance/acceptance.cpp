// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number, e.g. `acceptance 1 9`.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tsallis/bandit_core.hpp"
#include "tsallis/bounds.hpp"
#include "tsallis/harness.hpp"
#include "tsallis/verification.hpp"
#include "weight_oracle.hpp"

using namespace tsallis;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::vector<double> gap_means(std::size_t k) {
  std::vector<double> m(k);
  for (std::size_t i = 0; i < k; ++i) m[i] = 0.0625 + 0.125 * static_cast<double>(i);
  return m;
}

ExperimentConfig base_config(EnvironmentSpec env, std::size_t seeds, std::uint64_t master,
                             std::vector<std::size_t> checkpoints) {
  ExperimentConfig cfg;
  cfg.environment = std::move(env);
  cfg.seeds = expand_seeds(master, seeds);
  cfg.checkpoints = std::move(checkpoints);
  cfg.validate();
  return cfg;
}

std::size_t index_of(const AggregateResult& r, std::size_t checkpoint) {
  return static_cast<std::size_t>(
      std::find(r.checkpoints.begin(), r.checkpoints.end(), checkpoint) - r.checkpoints.begin());
}

// Runs (5) and (6) share the stochastic result.
const AggregateResult& stochastic_run() {
  static const AggregateResult result = [] {
    EnvironmentSpec env;
    env.arms = 8;
    env.horizon = 100000;
    env.params = StochasticParams{gap_means(8)};
    return run_experiment(base_config(env, 50, 5, {1000, 10000, 50000, 100000}));
  }();
  return result;
}

// -- Criteria ----------------------------------------------------------------

Outcome solver_correctness() {
  Rng rng(derive_seed(1, 0));
  const auto start = Clock::now();
  double worst = 0.0, worst_sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = 2 + rng() % 63;
    std::vector<double> l(k);
    for (double& x : l) x = 100.0 * uniform01(rng);
    const double eta = learning_rate(1 + rng() % 1000000);
    const auto w = tsallis_weights(l, eta);
    const auto ref = oracle::tsallis_weights_bisection(l, eta);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      worst = std::max(worst, std::abs(w[j] - ref[j]));
      s += w[j];
    }
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-8 && worst_sum <= 1e-9 && elapsed < 5.0,
          fmt("1000 instances, max |w - oracle| = %.3g, max |sum w - 1| = %.3g, %.2f s", worst,
              worst_sum, elapsed)};
}

Outcome estimator_unbiasedness() {
  Rng rng(derive_seed(2, 0));
  double worst_z = 0.0;
  int failures = 0;
  for (int pair = 0; pair < 20; ++pair) {
    const std::size_t k = 2 + rng() % 7;
    std::vector<double> w(k);
    double total = 0.0;
    for (double& x : w) total += (x = 0.02 + uniform01(rng));
    for (double& x : w) x /= total;
    const ArmDistribution dist{w};
    std::vector<double> loss(k);
    for (double& x : loss) x = uniform01(rng);
    const double eta = learning_rate(1 + rng() % 1000);

    constexpr int kDraws = 1000000;
    std::vector<double> m(k, 0.0), m2(k, 0.0);
    for (int d = 0; d < kDraws; ++d) {
      const std::size_t arm = sample_arm(dist, uniform01(rng));
      const auto e = reduced_variance_estimate(dist, arm, loss[arm], eta);
      for (std::size_t i = 0; i < k; ++i) {
        m[i] += e.values[i];
        m2[i] += e.values[i] * e.values[i];
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      const double mean = m[i] / kDraws;
      const double se = std::sqrt(std::max(0.0, m2[i] / kDraws - mean * mean) / kDraws);
      const double z = se > 0.0 ? std::abs(mean - loss[i]) / se : 0.0;
      worst_z = std::max(worst_z, z);
      if (z > 4.0) ++failures;
    }
  }
  return {failures == 0, fmt("20 pairs x 10^6 draws, worst |mean - l| / se = %.2f", worst_z)};
}

Outcome lemma_suite() {
  const auto start = Clock::now();
  const auto results = run_lemma_suite();
  const double elapsed = seconds_since(start);
  bool ok = elapsed < 30.0;
  std::string detail;
  const char* tags[] = {"a", "b", "c", "d"};
  for (std::size_t i = 0; i < results.size(); ++i) {
    ok = ok && results[i].passed;
    detail += fmt("\n    (%s) %s %s: %s", tags[i], results[i].passed ? "ok" : "FAILED",
                  results[i].name.c_str(), results[i].detail.c_str());
  }
  return {ok, fmt("%.2f s", elapsed) + detail};
}

Outcome adversarial_regime() {
  EnvironmentSpec env;
  env.arms = 2;
  env.horizon = 100000;
  env.params = ScriptParams{LossScript::alternating_leader(2, 100000)};
  const auto r = run_experiment(base_config(env, 20, 4, {100000}));
  BoundInputs in;
  in.arms = 2;
  in.horizon = 1e5;
  const double bound = theorem2_bounds(in).adversarial.value;
  const double lhs = r.mean_regret.back() + 2.0 * r.stderr_regret.back();
  return {lhs <= bound, fmt("mean %.2f, stderr %.2f, mean + 2se = %.2f <= adversarial bound %.2f",
                            r.mean_regret.back(), r.stderr_regret.back(), lhs, bound)};
}

Outcome stochastic_regime() {
  const auto& r = stochastic_run();
  BoundInputs in;
  in.arms = 8;
  in.horizon = 1e5;
  in.gaps = GapProfile::from_means(gap_means(8));
  const double eq4 = theorem2_bounds(in).self_bounding.value;
  const double zs = theorem1_bounds(in).self_bounding.value;
  const double lhs = r.mean_regret.back() + 2.0 * r.stderr_regret.back();
  const double at_1e4 = r.mean_regret[index_of(r, 10000)];
  const double growth = r.mean_regret.back() / at_1e4;
  const bool ok = lhs <= eq4 && lhs <= zs && growth <= 5.0;
  return {ok, fmt("mean %.2f, stderr %.2f, mean + 2se = %.2f <= self-bounding bound %.2f and <= prior self-bounding bound %.2f; "
                  "R(1e5)/R(1e4) = %.3f <= 5",
                  r.mean_regret.back(), r.stderr_regret.back(), lhs, eq4, zs, growth)};
}

Outcome constrained_regime() {
  EnvironmentSpec env;
  env.arms = 8;
  env.horizon = 100000;
  std::vector<double> gaps(8);
  for (std::size_t i = 0; i < 8; ++i) gaps[i] = 0.125 * static_cast<double>(i);
  env.params = ConstrainedParams{gaps, BaselineProcess::kUniform, 1000.0};
  const auto r = run_experiment(base_config(env, 50, 6, {100000}));
  const double ref = stochastic_run().mean_regret.back();
  const double ratio = r.mean_regret.back() / ref;
  return {ratio >= 0.5 && ratio <= 2.0,
          fmt("constrained mean %.2f vs stochastic mean %.2f, ratio %.3f in [0.5, 2]",
              r.mean_regret.back(), ref, ratio)};
}

Outcome corrupted_regime() {
  const double budget = 2000.0;
  const double s = 4.0;
  const auto range = refined_corruption_range(s, 2, 1e5, 1.0);
  const bool in_range = range.lower <= budget && budget <= range.upper && range.lower <= 2 * budget &&
                        2 * budget <= range.upper;
  EnvironmentSpec env;
  env.arms = 2;
  env.horizon = 100000;
  env.params = CorruptedParams{{0.375, 0.625}, budget, {AttackKind::kFrontload, 0, 1, 0.5}};
  const auto r = run_experiment(base_config(env, 50, 7, {100000}));
  const auto bound = theorem2_bounds(overlay_inputs(env)).refined;
  const double lhs = r.mean_regret.back() + 2.0 * r.stderr_regret.back();
  return {in_range && bound.valid && lhs <= bound.value,
          fmt("C = %.0f, range [%.2f, %.0f]; mean %.2f, stderr %.2f, mean + 2se = %.2f <= "
              "refined large-C bound at 2C %.2f",
              budget, range.lower, range.upper, r.mean_regret.back(), r.stderr_regret.back(), lhs,
              bound.value)};
}

Outcome sqrt_condition() {
  const auto& r = stochastic_run();
  const double d = 0.75 * std::sqrt(8.0) + 14.0 * 8.0 * std::log(1e5) + 15.0;
  const auto rep = verify_sqrt_condition(r, 1.25, d);
  return {rep.holds && rep.refined_holds,
          fmt("L = %.2f (se %.2f), R = %.2f, refined R = %.2f", rep.measured,
              rep.measured_stderr, rep.bound, rep.refined_bound)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism_and_performance() {
  std::string detail;
  bool ok = true;
#ifdef TSALLIS_CLI_PATH
  const fs::path dir = fs::temp_directory_path() / "tsallis_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({"arms": 8, "horizon": 20000, "seeds": {"master": 11, "count": 4},
      "checkpoints": [1000, 5000, 20000],
      "environment": {"regime": "stochastic",
                      "means": [0.0625, 0.1875, 0.3125, 0.4375, 0.5625, 0.6875, 0.8125, 0.9375]},
      "learner": {"estimator": "reduced_variance"},
      "output": {"weights_stride": 100}})";
  }
  auto run = [&](const std::string& out, const std::string& extra) {
    const std::string cmd = std::string("\"") + TSALLIS_CLI_PATH + "\" run \"" +
                            (dir / "config.json").string() + "\" --out-dir \"" +
                            (dir / out).string() + "\" " + extra + " > /dev/null";
    return std::system(cmd.c_str());
  };
  const int rc = run("a", "") | run("b", "") | run("c", "--threads 3");
  bool identical = rc == 0;
  for (const char* f : {"regret.csv", "weights.csv"}) {
    const std::string a = slurp(dir / "a" / f);
    identical = identical && !a.empty() && a == slurp(dir / "b" / f) && a == slurp(dir / "c" / f);
  }
  ok = ok && identical;
  detail += identical ? "repeated CLI runs byte-identical (also with --threads 3)"
                      : "CLI outputs differ or the CLI failed";
  fs::remove_all(dir);
#else
  ok = false;
  detail += "CLI not built";
#endif
  EnvironmentSpec env;
  env.arms = 8;
  env.horizon = 100000;
  env.params = StochasticParams{gap_means(8)};
  const auto start = Clock::now();
  const auto trace = run_episode(env, LearnerSpec{}, 99);
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 2.0 && trace.actions.size() == 100000;
  detail += fmt("; single K=8, T=1e5 episode %.3f s < 2 s", elapsed);
  return {ok, detail};
}

Outcome loglog_report() {
  RegimeGrid grid;
  grid.arms = {2, 8};
  grid.horizons = {1e4, 1e6, 1e8};
  grid.gap_profiles = {{0.0, 0.25}, {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875}};
  grid.corruptions = {0.0, 1000.0};
  const auto cells = regime_table(grid);
  std::string detail = "reported, not asserted:";
  bool reported = false;
  for (const auto& c : cells) {
    if (c.row != "loglog") continue;
    reported = true;
    detail += fmt("\n    K=%zu T=%.0e C=%.4g ratio(old/new) = %s, sqrt(lnT/lnlnT) = %.3f", c.arms,
                  c.horizon, c.corruption,
                  c.ratio_large_c ? fmt("%.3f", *c.ratio_large_c).c_str() : "NA",
                  c.loglog_reference);
  }
  return {reported, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"solver correctness", solver_correctness}},
      {2, {"estimator unbiasedness", estimator_unbiasedness}},
      {3, {"lemma suite", lemma_suite}},
      {4, {"adversarial regime", adversarial_regime}},
      {5, {"stochastic regime", stochastic_regime}},
      {6, {"stochastically constrained regime", constrained_regime}},
      {7, {"corrupted regime", corrupted_regime}},
      {8, {"sqrt condition", sqrt_condition}},
      {9, {"determinism and performance", determinism_and_performance}},
      {10, {"log T / log log T improvement (table column)", loglog_report}},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& [id, entry] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d, %s (%.1f s): %s\n", o.passed ? "PASS" : "FAIL", id,
                entry.first, seconds_since(start), o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
