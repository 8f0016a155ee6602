#pragma once

// Multi-seed experiment runner: configuration, episodes, aggregation, bound
// overlays, the empirical square-root condition, and CSV output.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsallis/bandit_core.hpp"
#include "tsallis/bounds.hpp"
#include "tsallis/environments.hpp"

namespace tsallis {

struct LearnerSpec {
  EstimatorKind estimator = EstimatorKind::kReducedVariance;
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  LearnerSpec learner;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> checkpoints;  // sorted, each in [1, T]
  std::size_t weights_stride = 1;
  std::filesystem::path output_dir = ".";
  std::string regret_file = "regret.csv";
  std::string weights_file = "weights.csv";
  unsigned threads = 1;  // execution only; never changes results

  std::size_t horizon() const { return environment.horizon; }
  std::size_t arms() const { return environment.arms; }
  void validate() const;
};

// seed_j = derive_seed(master, j), j = 0..count-1.
std::vector<std::uint64_t> expand_seeds(std::uint64_t master, std::size_t count);

// Geometric grid T/2^levels, T/2^(levels-1), ..., T (deduplicated, >= 1).
std::vector<std::size_t> geometric_checkpoints(std::size_t horizon, unsigned levels = 10);

// JSON configuration. Required: "arms", "horizon", "seeds", "checkpoints",
// "environment", "learner". Relative script paths resolve against base_dir.
// Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

// One episode with the given seed; fills actions, losses, per-round weights
// and cumulative pseudo-regret. SolverError messages carry seed and round.
RegretTrace run_episode(const EnvironmentSpec& env, const LearnerSpec& learner,
                        std::uint64_t seed);

struct BoundRow {
  std::size_t checkpoint = 0;
  Theorem1Bounds t1;
  Theorem2Bounds t2;
  Theorem3Bounds t3;
};

struct AggregateResult {
  std::size_t horizon = 0;
  std::size_t arms = 0;
  std::size_t seed_count = 0;
  std::optional<std::size_t> best_arm;  // known for gap-based regimes
  std::vector<std::size_t> checkpoints;
  std::vector<double> mean_regret;  // per checkpoint
  std::vector<double> stderr_regret;
  std::vector<double> final_regrets;  // per seed, in seed order
  std::vector<double> mean_weights;   // horizon x arms, row-major
  std::vector<BoundRow> bounds;       // per checkpoint
};

AggregateResult run_experiment(const ExperimentConfig& config);

// Inputs used for the bound overlay of an environment: its pre-corruption
// gaps, C = 0 for the uncorrupted regimes and 2C for the corrupted one,
// B = 5/4 and the default D.
BoundInputs overlay_inputs(const EnvironmentSpec& env);

// theorem1/2/3_bounds at each checkpoint T' treated as its own horizon. When
// inputs.d is unset D is recomputed for each T'.
std::vector<BoundRow> bound_overlay(const BoundInputs& inputs,
                                    const std::vector<std::size_t>& checkpoints);

struct SqrtConditionReport {
  double measured = 0.0;         // L: mean pseudo-regret at T
  double measured_stderr = 0.0;  // across seeds
  double bound = 0.0;            // R = B sum_t sum_{i!=i*} sqrt(E[w]/t) + D
  double refined_bound = 0.0;    // sum_t sum_{i!=i*} (sqrt(E[w]/t) + E[w]/(4 sqrt t)) + 14K log T + 3/4 sqrt K + 15
  bool holds = false;            // L - 2 se <= R
  bool refined_holds = false;    // L - 2 se <= refined R
};

// Throws UnsupportedError when the best arm is unknown.
SqrtConditionReport verify_sqrt_condition(const AggregateResult& result, double b, double d);

struct RegimeCell {
  std::size_t arms = 0;
  double horizon = 0.0;
  double s = 0.0;
  double corruption = 0.0;
  std::string row;  // "small_c", "large_c" or "loglog"
  BoundValue old_self_bounding;  // theorem1_bounds().self_bounding
  BoundValue new_self_bounding;  // theorem2_bounds().self_bounding
  BoundValue old_large_c;        // theorem1_bounds().large_corruption
  BoundValue new_large_c;        // theorem2_bounds().refined
  std::optional<double> ratio_self_bounding;  // old / new when both valid
  std::optional<double> ratio_large_c;
  double loglog_reference = 0.0;  // sqrt(log T / log log T)
};

struct RegimeGrid {
  std::vector<std::size_t> arms;
  std::vector<double> horizons;
  std::vector<std::vector<double>> gap_profiles;  // each must match one K
  std::vector<double> corruptions;
  bool include_loglog_row = true;  // adds C = TK / (log(T) S)
};

RegimeGrid parse_regime_grid(const std::string& json_text);
std::vector<RegimeCell> regime_table(const RegimeGrid& grid);

// CSV output. Invalid bounds are written as NA.
void write_regret_csv(const AggregateResult& result, std::ostream& out);
void write_weights_csv(const AggregateResult& result, std::size_t stride, std::ostream& out);
void write_regime_csv(const std::vector<RegimeCell>& cells, std::ostream& out);

// Writes regret and weights CSV files under config.output_dir.
void write_outputs(const AggregateResult& result, const ExperimentConfig& config);

// Shortest round-trippable decimal form used in every CSV cell.
std::string format_number(double v);

}  // namespace tsallis
