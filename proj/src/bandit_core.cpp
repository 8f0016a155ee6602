#include "tsallis/bandit_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tsallis/error.hpp"

namespace tsallis {
namespace {

constexpr double kGapFloor = 1e-14;

struct Potential {
  double value;       // sum_i 4 / (a_i - z)^2 - 1
  double derivative;  // sum_i 8 / (a_i - z)^3
};

Potential evaluate(std::span<const double> scaled, double z) {
  double value = -1.0;
  double derivative = 0.0;
  for (double a : scaled) {
    const double d = std::max(a - z, kGapFloor);
    const double inv = 1.0 / d;
    const double inv2 = inv * inv;
    value += 4.0 * inv2;
    derivative += 8.0 * inv2 * inv;
  }
  return {value, derivative};
}

void check_distribution(const ArmDistribution& w, std::size_t played) {
  if (played >= w.size()) throw std::out_of_range("played arm out of range");
}

}  // namespace

double learning_rate(std::uint64_t t) {
  if (t == 0) throw DomainError("learning_rate: rounds start at 1");
  return 4.0 / std::sqrt(static_cast<double>(t));
}

WeightSolution solve_tsallis_weights(std::span<const double> cumulative_estimates,
                                     double eta, std::optional<double> warm_start) {
  const std::size_t k = cumulative_estimates.size();
  if (k == 0) throw std::invalid_argument("tsallis_weights: no arms");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("tsallis_weights: eta must be positive and finite");
  }
  double min_estimate = cumulative_estimates[0];
  for (double v : cumulative_estimates) {
    if (!std::isfinite(v)) throw std::invalid_argument("tsallis_weights: non-finite estimate");
    min_estimate = std::min(min_estimate, v);
  }

  // In z = eta * (x - min L) the weights are 4 / (a_i - z)^2 with
  // a_i = eta * (L_i - min L) >= 0. At z = -2 the leading arm alone has
  // weight 1; at z = -2 sqrt(K) every weight is at most 1/K.
  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < k; ++i) {
    scaled[i] = eta * (cumulative_estimates[i] - min_estimate);
  }
  double lo = -2.0 * std::sqrt(static_cast<double>(k));
  double hi = -2.0;
  double z = hi;
  if (warm_start && *warm_start > lo && *warm_start < hi) z = *warm_start;

  // Phi is increasing and convex in z, so Newton from the right of the root
  // is monotone; the bracket catches the overshoot from the left.
  Potential p = evaluate(scaled, z);
  int iterations = 0;
  while (std::abs(p.value) > kSolverTolerance && iterations < kSolverIterationCap) {
    ++iterations;
    if (p.value > 0.0) {
      hi = z;
    } else {
      lo = z;
    }
    double next = z - p.value / p.derivative;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == z) break;
    z = next;
    p = evaluate(scaled, z);
  }
  if (std::abs(p.value) > kSolverTolerance) {
    std::ostringstream msg;
    msg << "tsallis_weights: normalisation root not found after " << iterations
        << " iterations (residual " << p.value << ")";
    throw SolverError(msg.str(), p.value, iterations);
  }

  WeightSolution out;
  out.root = z;
  out.residual = p.value;
  out.iterations = iterations;
  out.distribution.weights.resize(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = std::max(scaled[i] - z, kGapFloor);
    out.distribution.weights[i] = 4.0 / (d * d);
    total += out.distribution.weights[i];
  }
  for (double& w : out.distribution.weights) w /= total;
  return out;
}

ArmDistribution tsallis_weights(std::span<const double> cumulative_estimates, double eta) {
  return solve_tsallis_weights(cumulative_estimates, eta).distribution;
}

LossEstimate reduced_variance_estimate(const ArmDistribution& w, std::size_t played,
                                       double observed_loss, double eta) {
  check_distribution(w, played);
  if (!(observed_loss >= 0.0 && observed_loss <= 1.0)) {
    throw std::invalid_argument("reduced_variance_estimate: loss outside [0,1]");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("reduced_variance_estimate: eta must be > 0");
  const double threshold = eta * eta;
  LossEstimate est;
  est.played_arm = played;
  est.baseline.resize(w.size());
  est.values.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    est.baseline[i] = w[i] >= threshold ? 0.5 : 0.0;
    est.values[i] = est.baseline[i];
  }
  est.values[played] += (observed_loss - est.baseline[played]) / w[played];
  return est;
}

LossEstimate importance_weighted_estimate(const ArmDistribution& w, std::size_t played,
                                          double observed_loss) {
  check_distribution(w, played);
  LossEstimate est;
  est.played_arm = played;
  est.baseline.assign(w.size(), 0.0);
  est.values.assign(w.size(), 0.0);
  est.values[played] = observed_loss / w[played];
  return est;
}

std::size_t sample_arm(const ArmDistribution& w, double u) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cumulative += w[i];
    if (u < cumulative) return i;
  }
  // u landed in the rounding slack above the last partial sum.
  return w.size() - 1;
}

StepOutcome step(LearnerState& state, EstimatorKind estimator, const LossOracle& reveal,
                 Rng& rng) {
  const double eta = learning_rate(state.round);
  WeightSolution sol =
      solve_tsallis_weights(state.cumulative_estimates, eta, state.last_solver_root);
  state.last_solver_root = sol.root;

  StepOutcome out;
  out.arm = sample_arm(sol.distribution, uniform01(rng));
  out.loss = reveal(out.arm);

  const LossEstimate est =
      estimator == EstimatorKind::kReducedVariance
          ? reduced_variance_estimate(sol.distribution, out.arm, out.loss, eta)
          : importance_weighted_estimate(sol.distribution, out.arm, out.loss);
  for (std::size_t i = 0; i < est.values.size(); ++i) {
    state.cumulative_estimates[i] += est.values[i];
  }
  ++state.round;
  out.weights = std::move(sol.distribution);
  return out;
}

StepOutcome step(LearnerState& state, EstimatorKind estimator,
                 std::span<const double> loss_vector, Rng& rng) {
  if (loss_vector.size() != state.cumulative_estimates.size()) {
    throw std::invalid_argument("step: loss vector has the wrong length");
  }
  return step(state, estimator, [&](std::size_t arm) { return loss_vector[arm]; }, rng);
}

TsallisInf::TsallisInf(std::size_t arms, EstimatorKind estimator)
    : state_(arms), estimator_(estimator) {
  if (arms < 2) throw std::invalid_argument("TsallisInf needs at least two arms");
}

StepOutcome TsallisInf::step(std::span<const double> loss_vector, Rng& rng) {
  return tsallis::step(state_, estimator_, loss_vector, rng);
}

StepOutcome TsallisInf::step(const LossOracle& reveal, Rng& rng) {
  return tsallis::step(state_, estimator_, reveal, rng);
}

ArmDistribution TsallisInf::current_weights() const {
  return tsallis_weights(state_.cumulative_estimates, learning_rate(state_.round));
}

}  // namespace tsallis
