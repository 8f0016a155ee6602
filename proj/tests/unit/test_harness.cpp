#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "tsallis/error.hpp"
#include "tsallis/harness.hpp"

using namespace tsallis;

namespace {

const char* kStochastic = R"({
  "arms": 2, "horizon": 400,
  "seeds": [1, 2, 3, 4, 5],
  "checkpoints": [10, 100, 400],
  "environment": {"regime": "stochastic", "means": [0.25, 0.75]},
  "learner": {"estimator": "reduced_variance"},
  "output": {"weights_stride": 50}
})";

std::string regret_csv(const AggregateResult& r) {
  std::ostringstream os;
  write_regret_csv(r, os);
  return os.str();
}

std::string weights_csv(const AggregateResult& r, std::size_t stride) {
  std::ostringstream os;
  write_weights_csv(r, stride, os);
  return os.str();
}

}  // namespace

TEST_CASE("single short episode") {
  auto cfg = parse_config(kStochastic);
  cfg.environment.horizon = 10;
  const auto trace = run_episode(cfg.environment, cfg.learner, 1);
  CHECK(trace.actions.size() == 10);
  CHECK(trace.cumulative_pseudo_regret.size() == 10);
  for (std::size_t t = 1; t < 10; ++t) {
    CHECK(trace.cumulative_pseudo_regret[t] >= trace.cumulative_pseudo_regret[t - 1]);
  }
  CHECK(trace.weight_sums.size() == 20);
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  auto cfg = parse_config(kStochastic);
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  cfg.threads = 3;
  const auto c = run_experiment(cfg);
  CHECK(regret_csv(a) == regret_csv(b));
  CHECK(regret_csv(a) == regret_csv(c));
  CHECK(weights_csv(a, 7) == weights_csv(c, 7));
  CHECK(a.final_regrets == c.final_regrets);
}

TEST_CASE("aggregation") {
  const auto r = run_experiment(parse_config(kStochastic));
  double mean = 0.0;
  for (double x : r.final_regrets) mean += x;
  mean /= static_cast<double>(r.final_regrets.size());
  CHECK(std::abs(r.mean_regret.back() - mean) <= 1e-12);
  for (double se : r.stderr_regret) CHECK(se >= 0.0);
  for (std::size_t t = 0; t < r.horizon; ++t) {
    CHECK(r.mean_weights[2 * t] + r.mean_weights[2 * t + 1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  REQUIRE(r.best_arm.has_value());
  CHECK(*r.best_arm == 0);
  const std::string csv = regret_csv(r);
  CHECK(csv.rfind("checkpoint,mean_regret,stderr,bound_t1_adv,bound_t1_sto,bound_t1_stoC,"
                  "bound_t2_adv,bound_t2_sto,bound_t2_stoC,bound_t3_adv,bound_t3_sto,bound_t3_stoC\n",
                  0) == 0);
  CHECK(csv.find("NA") != std::string::npos);  // large-C columns at C = 0
}

TEST_CASE("weights csv stride") {
  const auto r = run_experiment(parse_config(kStochastic));
  const std::string csv = weights_csv(r, 100);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "round,w0,w1");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK(csv.find("\n1,0.5,0.5\n") != std::string::npos);
}

TEST_CASE("bound overlay") {
  BoundInputs in;
  in.arms = 2;
  in.gaps = GapProfile({0.0, 0.5});
  const auto rows = bound_overlay(in, geometric_checkpoints(10000));
  CHECK(rows.front().checkpoint == 9);
  CHECK(rows.back().checkpoint == 10000);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK_FALSE(rows[i].t2.refined.valid);
    CHECK_FALSE(rows[i].t3.refined.valid);
    if (i == 0) continue;
    CHECK(rows[i].t1.adversarial.value >= rows[i - 1].t1.adversarial.value);
    CHECK(rows[i].t2.adversarial.value >= rows[i - 1].t2.adversarial.value);
    CHECK(rows[i].t3.adversarial.value >= rows[i - 1].t3.adversarial.value);
    if (rows[i - 1].t2.self_bounding.valid) {
      CHECK(rows[i].t2.self_bounding.value >= rows[i - 1].t2.self_bounding.value);
    }
    CHECK(rows[i].t3.self_bounding.value >= rows[i - 1].t3.self_bounding.value);
  }
  BoundInputs at = in;
  at.horizon = 1e4;
  CHECK(rows.back().t3.adversarial.value == theorem3_bounds(at).adversarial.value);
}

TEST_CASE("sqrt condition: a learner that always plays the best arm") {
  AggregateResult r;
  r.horizon = 100;
  r.arms = 2;
  r.seed_count = 1;
  r.best_arm = 0;
  r.final_regrets = {0.0};
  for (std::size_t t = 0; t < 100; ++t) {
    r.mean_weights.push_back(1.0);
    r.mean_weights.push_back(0.0);
  }
  const double d = tsallis_default_d(2, 100.0);
  const auto rep = verify_sqrt_condition(r, kTsallisB, d);
  CHECK(rep.measured == 0.0);
  CHECK(rep.bound == doctest::Approx(d));
  CHECK(rep.holds);
  CHECK(rep.refined_holds);
  r.best_arm.reset();
  CHECK_THROWS_AS(verify_sqrt_condition(r, kTsallisB, d), UnsupportedError);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"arms": 2})"), ConfigError);
  std::string no_seeds = kStochastic;
  no_seeds.replace(no_seeds.find("\"seeds\""), 7, "\"sneed\"");
  CHECK_THROWS_AS(parse_config(no_seeds), ConfigError);
  std::string unsorted = kStochastic;
  unsorted.replace(unsorted.find("[10, 100, 400]"), 14, "[100, 10, 400]");
  CHECK_THROWS_AS(parse_config(unsorted), ConfigError);
  std::string beyond = kStochastic;
  beyond.replace(beyond.find("[10, 100, 400]"), 14, "[10, 100, 401]");
  CHECK_THROWS_AS(parse_config(beyond), ConfigError);
  std::string regime = kStochastic;
  regime.replace(regime.find("\"stochastic\""), 12, "\"quantum\"");
  CHECK_THROWS_AS(parse_config(regime), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent.json"), ConfigError);
}

TEST_CASE("seed expansion") {
  const auto cfg = parse_config(R"({
    "arms": 2, "horizon": 50, "seeds": {"master": 9, "count": 4}, "checkpoints": [50],
    "environment": {"regime": "corrupted_stochastic", "means": [0.6, 0.4], "budget": 10,
                    "attack": {"policy": "frontload"}},
    "learner": {"estimator": "importance_weighted"}})");
  CHECK(cfg.seeds == expand_seeds(9, 4));
  CHECK(cfg.seeds[0] == derive_seed(9, 0));
  const auto& p = std::get<CorruptedParams>(cfg.environment.params);
  CHECK(p.attack.best_arm == 1);
  CHECK(overlay_inputs(cfg.environment).corruption == 20.0);
  const auto r = run_experiment(cfg);
  CHECK(r.final_regrets.size() == 4);
}

TEST_CASE("script environments from file and builtin") {
  const auto file_cfg = parse_config(R"({
    "arms": 2, "horizon": 3, "seeds": [1], "checkpoints": [3],
    "environment": {"regime": "adversarial_script", "script": {"file": "script.txt"}},
    "learner": {"estimator": "reduced_variance"}})",
                                     TSALLIS_TEST_DATA);
  const auto r = run_experiment(file_cfg);
  CHECK_FALSE(r.best_arm.has_value());
  CHECK(r.mean_regret.back() >= 0.0);

  const auto leader = parse_config(R"({
    "arms": 3, "horizon": 500, "seeds": [1, 2], "checkpoints": [100, 500],
    "environment": {"regime": "adversarial_script", "script": "alternating_leader"},
    "learner": {"estimator": "reduced_variance"}})");
  CHECK(run_experiment(leader).mean_regret.size() == 2);
}

TEST_CASE("regime table") {
  const auto grid = parse_regime_grid(R"({
    "arms": [2, 4], "horizons": [1e4, 1e6],
    "gap_profiles": [[0, 0.1], [0, 0.2, 0.2, 0.5]],
    "corruptions": [0, 50, 5000]})");
  const auto cells = regime_table(grid);
  CHECK(cells.size() == 2 * 2 * 4);
  int loglog = 0;
  for (const auto& c : cells) {
    if (c.corruption == 0.0) {
      CHECK_FALSE(c.old_large_c.valid);
      CHECK_FALSE(c.new_large_c.valid);
      CHECK(c.row == "small_c");
    }
    if (c.ratio_self_bounding) CHECK((std::isfinite(*c.ratio_self_bounding) && *c.ratio_self_bounding > 0.0));
    if (c.ratio_large_c) CHECK((std::isfinite(*c.ratio_large_c) && *c.ratio_large_c > 0.0));
    if (c.row == "loglog") {
      ++loglog;
      CHECK(c.corruption == doctest::Approx(c.horizon * c.arms / (std::log(c.horizon) * c.s)));
      CHECK(c.loglog_reference ==
            doctest::Approx(std::sqrt(std::log(c.horizon) / std::log(std::log(c.horizon)))));
    }
  }
  CHECK(loglog == 4);
  std::ostringstream os;
  write_regime_csv(cells, os);
  CHECK(os.str().rfind("K,T,S,C,row,", 0) == 0);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 12345.678, 1e-300, 0.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(std::nan("")) == "NA");
}
