#pragma once

// Tsallis-INF: FTRL over the simplex with the 1/2-Tsallis regulariser
// Psi(w) = 4 * sum_i (sqrt(w_i) - w_i / 2), learning rate eta_t = 4 / sqrt(t).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tsallis/random.hpp"

namespace tsallis {

// Probability vector over the K arms. Every entry is strictly positive and the
// entries sum to one.
struct ArmDistribution {
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
};

struct LearnerState {
  explicit LearnerState(std::size_t arms) : cumulative_estimates(arms, 0.0) {}

  std::vector<double> cumulative_estimates;  // L-hat after round - 1 rounds
  std::uint64_t round = 1;                    // next round to be played
  // Scale-free normalisation root eta * (x - min L) of the previous round.
  std::optional<double> last_solver_root;
};

struct LossEstimate {
  std::vector<double> values;
  std::size_t played_arm = 0;
  std::vector<double> baseline;  // entries in {0, 1/2}
};

enum class EstimatorKind { kReducedVariance, kImportanceWeighted };

// 4 / sqrt(t). Throws DomainError for t = 0.
double learning_rate(std::uint64_t t);

struct WeightSolution {
  ArmDistribution distribution;
  double root = 0.0;  // eta * (x - min_i L_i), always in [-2 sqrt(K), -2]
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr int kSolverIterationCap = 100;
inline constexpr double kSolverTolerance = 1e-12;

// Maximiser of <-L, w> - Psi(w) / eta over the simplex. The stationarity
// condition gives w_i = 4 / (eta * (L_i - x))^2 for a scalar x < min_i L_i
// fixed by sum_i w_i = 1; x is found by Newton steps safeguarded by
// bisection. Throws SolverError if |sum w - 1| > 1e-12 after the cap.
WeightSolution solve_tsallis_weights(std::span<const double> cumulative_estimates,
                                     double eta,
                                     std::optional<double> warm_start = std::nullopt);

ArmDistribution tsallis_weights(std::span<const double> cumulative_estimates, double eta);

// l-hat_i = 1[i = played] (loss - B_i) / w_i + B_i with B_i = 1/2 * 1[w_i >= eta^2].
LossEstimate reduced_variance_estimate(const ArmDistribution& w, std::size_t played,
                                       double observed_loss, double eta);

// l-hat_i = 1[i = played] loss / w_i.
LossEstimate importance_weighted_estimate(const ArmDistribution& w, std::size_t played,
                                          double observed_loss);

// Inverse CDF: the first arm whose cumulative weight exceeds u in [0, 1).
std::size_t sample_arm(const ArmDistribution& w, double u);

struct StepOutcome {
  std::size_t arm = 0;
  double loss = 0.0;
  ArmDistribution weights;
};

// Reveals the loss of one arm. The learner calls it exactly once per round,
// for the arm it played.
using LossOracle = std::function<double(std::size_t)>;

// One round of the play loop: compute w_t, sample I_t, observe the loss of
// I_t, update L-hat, advance the round counter.
StepOutcome step(LearnerState& state, EstimatorKind estimator, const LossOracle& reveal,
                 Rng& rng);
StepOutcome step(LearnerState& state, EstimatorKind estimator,
                 std::span<const double> loss_vector, Rng& rng);

class TsallisInf {
 public:
  explicit TsallisInf(std::size_t arms,
                      EstimatorKind estimator = EstimatorKind::kReducedVariance);

  StepOutcome step(std::span<const double> loss_vector, Rng& rng);
  StepOutcome step(const LossOracle& reveal, Rng& rng);

  // Distribution that would be played in the next round.
  ArmDistribution current_weights() const;

  const LearnerState& state() const { return state_; }
  EstimatorKind estimator() const { return estimator_; }
  std::size_t arms() const { return state_.cumulative_estimates.size(); }

 private:
  LearnerState state_;
  EstimatorKind estimator_;
};

// Record of one episode. Per-round matrices are row-major horizon x arms.
struct RegretTrace {
  std::size_t horizon = 0;
  std::size_t arms = 0;
  std::vector<std::size_t> actions;
  std::vector<double> incurred_losses;
  std::vector<double> cumulative_pseudo_regret;
  // w_t for every round; summed over seeds for Monte-Carlo E[w_t].
  std::vector<double> weight_sums;
  // Per-round expected loss vectors used as the regret reference when the
  // gaps alone do not determine it (scripts, corruption). Empty otherwise.
  std::vector<double> reference_losses;
};

}  // namespace tsallis
