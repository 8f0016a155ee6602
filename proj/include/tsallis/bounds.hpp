#pragma once

// Closed-form pseudo-regret bounds for Tsallis-INF and for any algorithm
// satisfying the square-root condition
//   Reg_T <= B sum_t sum_{i != i*} sqrt(E[w_{t,i}] / t) + D,
// together with the auxiliary functions used to optimise them. Natural
// logarithms throughout.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsallis/gap_profile.hpp"

namespace tsallis {

// Default square-root condition constants of Tsallis-INF with reduced-variance
// estimators.
inline constexpr double kTsallisB = 1.25;
double tsallis_default_d(std::size_t arms, double horizon);

struct BoundInputs {
  std::size_t arms = 2;
  double horizon = 1.0;
  std::optional<GapProfile> gaps;  // absent: only the adversarial bounds apply
  double corruption = 0.0;         // C
  double b = kTsallisB;
  std::optional<double> d;  // absent: tsallis_default_d(arms, horizon)

  double d_value() const;
  // Throws std::invalid_argument for K < 2, T < 1, negative C/B/D or a gap
  // profile of the wrong size.
  void validate() const;
};

struct BoundValue {
  double value = 0.0;
  bool valid = true;
  std::string validity_reason;  // empty when valid
};

struct Theorem1Bounds {
  BoundValue adversarial;       // 2 sqrt(KT) + 10 K log T + 16
  BoundValue self_bounding;     // (log T + 3) S + 28 K log T + 1/Delta_min + ... + C
  BoundValue large_corruption;  // 2 sqrt(((log T + 3) S + 1/Delta_min) C) + ...
};

struct Theorem2Bounds {
  BoundValue adversarial;    // 2 sqrt((K-1)T) + sqrt(T)/2 + 14 K log T + 3/4 sqrt K + 15
  BoundValue self_bounding;  // S (log(T(K-1)/S^2) + 6) + 28 K log T + 3/2 sqrt K + 30 + C
  BoundValue refined;        // sqrt(CS)(sqrt(log(T(K-1)/(CS))) + 5) + Q
};

struct Theorem3Bounds {
  BoundValue adversarial;    // 2 B sqrt((K-1)T) + D
  BoundValue self_bounding;  // B^2 S (log(T(K-1)/S^2) + 3 - 2 log B) + C + 2D
  BoundValue refined;        // B sqrt(CS)(sqrt(log(T(K-1)/(CS))) + 2) + M
};

Theorem1Bounds theorem1_bounds(const BoundInputs& in);
Theorem2Bounds theorem2_bounds(const BoundInputs& in);
Theorem3Bounds theorem3_bounds(const BoundInputs& in);

// C range in which the refined bounds hold:
// b^2 S (log(T(K-1)/(b^2 S^2)) + 1) <= C <= T(K-1)/S  (b = 1 for theorem2_bounds).
struct CorruptionRange {
  double lower;
  double upper;
};
CorruptionRange refined_corruption_range(double s, std::size_t arms, double horizon, double b);

// max(1, log x). Throws DomainError for x <= 0.
double log_plus(double x);

// Lower real branch of Lambert W: the w <= -1 with w e^w = y, for
// y in [-1/e, 0). Throws DomainError outside that interval.
double lambert_w_minus1(double y);

// Two-sided bound on -W_{-1}(-x/e) for x in (0, 1]:
//   1 + sqrt(2 u) + 2u/3 <= -W_{-1}(-x/e) <= 1 + sqrt(2 u) + u,  u = log(1/x).
std::pair<double, double> lambert_bounds(double x);

// max_x sum_i (b x_i - c_i x_i^2) subject to sum_i x_i <= M.
struct QuadraticMaxResult {
  double value;
  std::vector<double> maximizer;
  bool budget_active;  // sum_i b / (2 c_i) > M
};
QuadraticMaxResult lemma_opt_solve(double b, std::span<const double> c, double m);

// sum_{t=T0+1}^{T} 1 / (b t^{3/2} - c t) against the bound 2/c, valid when
// b sqrt(T0) >= 2c.
struct CorollarySum {
  double sum;
  double bound;
  bool holds;
};
CorollarySum corollary_sum_check(double b, double c, std::uint64_t t0, std::uint64_t t);

// f(alpha) = (S/alpha)(3 + log(T(K-1)/S^2)) + (2S/alpha) log(alpha) + alpha C
double f_eval(double alpha, double s, double c, std::size_t arms, double horizon);
// f'(alpha) = -(1/alpha^2)[2S log alpha - C alpha^2 + S log((K-1)T/S^2) + S]
double f_derivative(double alpha, double s, double c, std::size_t arms, double horizon);
// f''(alpha) = (2S/alpha^3)(2 log alpha + log(T(K-1)/S^2))
double f_second_derivative(double alpha, double s, std::size_t arms, double horizon);
// g(beta) = CS/((K-1)T) beta - log(beta) - 1
double g_eval(double beta, double s, double c, std::size_t arms, double horizon);
// h(B, alpha) = B / (2 - B alpha) f(alpha), for 0 < alpha < 2/B.
double h_eval(double b, double alpha, double s, double c, std::size_t arms, double horizon);

// Quantities of the joint (lambda, alpha) optimisation.
struct SelfBoundingDiagnostics {
  double s = 0.0;
  double lambda = 0.0;      // from alpha = 2 lambda / (B (lambda + 1))
  double alpha = 0.0;
  double alpha_star = 0.0;  // argmin of f on [S/sqrt(T(K-1)), 1/B]
  double w = 0.0;           // -W_{-1}(-CS / (e (K-1) T)) >= 1
  double threshold_t0 = 0.0;  // B^2 (lambda+1)^2 S^2 / (4 lambda^2 (K-1))
  std::optional<double> threshold_t1;  // (1 / (alpha Delta_min))^2, needs gaps
  double threshold_t2 = 0.0;  // S^2 / ((K-1) alpha^2)
};

// alpha* = sqrt((-S/C) W_{-1}(-CS / (e (K-1) T))). Throws DomainError when C
// is outside refined_corruption_range(S, K, T, B).
SelfBoundingDiagnostics alpha_star(double s, double c, std::size_t arms, double horizon,
                                   double b, std::optional<double> delta_min = std::nullopt);

// The inequality chain that turns h(B, alpha*) into the refined bound:
//   h(B, a*) = B/(2 - B a*) (2S/a* + 2C a*)
//           <= B (S/a* + C a* + BS + BC a*^2)
//            = B (sqrt(CS/w) + sqrt(CSw) + BS + BSw)
//           <= B sqrt(CS)(sqrt(l) + 2) + B^2 S (l + sqrt(2 l) + 2),  l = log(T(K-1)/(CS)).
struct HBoundChain {
  double h_direct;       // B/(2 - B a*) f(a*)
  double h_substituted;  // after the stationarity identity
  double relaxed;        // 2/(2-x) <= 1 + x
  double lambert_form;   // in terms of w
  double closed_form;    // after the Lambert upper bound
};
HBoundChain h_bound_chain(double s, double c, std::size_t arms, double horizon, double b);

}  // namespace tsallis
