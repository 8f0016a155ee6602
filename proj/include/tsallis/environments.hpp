#pragma once

// Loss generators for the stochastic, stochastically constrained,
// adversarial-script and corrupted-stochastic regimes, with corruption
// accounting and pseudo-regret.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsallis/bandit_core.hpp"
#include "tsallis/gap_profile.hpp"
#include "tsallis/random.hpp"

namespace tsallis {

enum class Regime {
  kStochastic,
  kStochasticallyConstrained,
  kAdversarialScript,
  kCorruptedStochastic,
};

std::string to_string(Regime regime);

// Common baseline b_t of the stochastically constrained regime.
enum class BaselineProcess {
  kUniform,     // b_t ~ U[0, 1 - max Delta]
  kSinusoidal,  // b_t = (1 - max Delta) (1 + sin(2 pi t / P)) / 2
};

enum class AttackKind {
  kNone,
  kFrontload,     // best arm's loss set to 1 until the budget runs out
  kTargetedSwap,  // target arm set to 0 and best arm to 1 while budget lasts
  kRandom,        // random arm gets a random value with some probability
};

struct AttackPolicy {
  AttackKind kind = AttackKind::kNone;
  std::size_t best_arm = 0;    // arm attacked by frontload / targeted-swap
  std::size_t target_arm = 1;  // arm promoted by targeted-swap
  double probability = 0.5;    // per-round attack probability (random)
};

class CorruptionLedger {
 public:
  explicit CorruptionLedger(double budget = 0.0);

  double budget() const { return budget_; }
  double spent() const { return spent_; }
  double remaining() const { return budget_ - spent_; }

  // Charges `amount` if it fits in the remaining budget.
  bool try_spend(double amount);

 private:
  double budget_;
  double spent_ = 0.0;
};

// Returns the corrupted loss vector for round t. The ledger is charged
// ||corrupted - clean||_inf; a corruption that would exceed the budget is not
// applied and the clean vector is returned unchanged.
std::vector<double> corruption_attack(const AttackPolicy& policy,
                                      std::span<const double> clean_losses,
                                      CorruptionLedger& ledger, std::size_t t, Rng& rng);

// Deterministic loss matrix, rows = rounds.
class LossScript {
 public:
  LossScript(std::size_t arms, std::vector<double> row_major);

  // Plain text, one row per round, `arms` whitespace-separated reals in [0,1].
  static LossScript load(const std::filesystem::path& path, std::size_t arms);
  static LossScript parse(std::istream& in, std::size_t arms);

  // Best arm switches every ceil(sqrt(T)) rounds; leader loss 0, others 1.
  static LossScript alternating_leader(std::size_t arms, std::size_t horizon);

  std::size_t arms() const { return arms_; }
  std::size_t rows() const { return arms_ == 0 ? 0 : values_.size() / arms_; }
  // Row of round t (1-based).
  std::span<const double> row(std::size_t t) const;

 private:
  std::size_t arms_;
  std::vector<double> values_;
};

// Adaptive adversary: loss vector for round t given the learner's past actions.
using AdaptiveScript =
    std::function<std::vector<double>(std::size_t t, std::span<const std::size_t> history)>;

struct StochasticParams {
  std::vector<double> means;  // Bernoulli parameters
};

struct ConstrainedParams {
  std::vector<double> gaps;
  BaselineProcess baseline = BaselineProcess::kUniform;
  double period = 1000.0;  // sinusoidal period P in rounds
};

struct ScriptParams {
  std::variant<LossScript, AdaptiveScript> source;
};

struct CorruptedParams {
  std::vector<double> means;
  double budget = 0.0;
  AttackPolicy attack;
};

struct EnvironmentSpec {
  std::size_t arms = 0;
  std::size_t horizon = 0;
  std::variant<StochasticParams, ConstrainedParams, ScriptParams, CorruptedParams> params;

  Regime regime() const;
  // Pre-corruption gaps where the regime has them.
  std::optional<GapProfile> gap_profile() const;
  // True for regimes whose regret needs per-round reference losses.
  bool needs_reference() const;
  // Throws ConfigError on inconsistent sizes, out-of-range parameters or a
  // script shorter than the horizon.
  void validate() const;
};

struct LossDraw {
  std::vector<double> losses;     // what the learner faces
  std::vector<double> clean;      // pre-corruption vector (corrupted regime)
  std::vector<double> reference;  // expected-loss reference (if needed)
};

// Stateful generator for one episode. Draws come from the environment and
// attack sub-streams of the episode seed, so a zero corruption budget
// reproduces the stochastic stream exactly.
class LossGenerator {
 public:
  LossGenerator(const EnvironmentSpec& spec, std::uint64_t episode_seed);

  // Loss vector of round t (1-based, t <= horizon).
  LossDraw sample_losses(std::size_t t, std::span<const std::size_t> history);

  const CorruptionLedger& ledger() const { return ledger_; }

 private:
  const EnvironmentSpec* spec_;
  Rng env_rng_;
  Rng attack_rng_;
  CorruptionLedger ledger_;
};

// Cumulative pseudo-regret after each round of the trace.
//  - stochastic / stochastically constrained: sum_{s<=t} Delta_{I_s};
//  - script and corrupted regimes: sum_{s<=t} r_{s,I_s} - min_i sum_{s<=t} r_{s,i}
//    with r the trace's reference losses (or the script rows).
// Throws UnsupportedError when neither gaps nor references are available.
std::vector<double> pseudo_regret(const RegretTrace& trace, const EnvironmentSpec& spec);

// sum_{s<=t} Delta_{I_s} for an arbitrary gap profile.
std::vector<double> gap_regret(const RegretTrace& trace, const GapProfile& gaps);

}  // namespace tsallis
