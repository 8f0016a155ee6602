#include "tsallis/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tsallis/error.hpp"

namespace tsallis {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInvE = 1.0 / std::numbers::e;
constexpr int kLambertIterationCap = 200;
constexpr double kLambertResidual = 1e-12;

BoundValue invalid(double value, std::string reason) {
  return {value, false, std::move(reason)};
}

// Shared preconditions of the self-bounding forms. Returns an empty string
// when the gap profile is usable.
std::string gap_problem(const BoundInputs& in) {
  if (!in.gaps) return "no gap profile";
  if (!in.gaps->unique_best()) return "non-unique best arm";
  return {};
}

double km1(const BoundInputs& in) { return static_cast<double>(in.arms) - 1.0; }

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

void require_arms(std::size_t arms) {
  if (arms < 2) throw DomainError("need at least two arms");
}

}  // namespace

double tsallis_default_d(std::size_t arms, double horizon) {
  const double k = static_cast<double>(arms);
  return 0.75 * std::sqrt(k) + 14.0 * k * std::log(horizon) + 15.0;
}

double BoundInputs::d_value() const { return d ? *d : tsallis_default_d(arms, horizon); }

void BoundInputs::validate() const {
  if (arms < 2) throw std::invalid_argument("BoundInputs: K must be >= 2");
  if (!(horizon >= 1.0)) throw std::invalid_argument("BoundInputs: T must be >= 1");
  if (!(corruption >= 0.0)) throw std::invalid_argument("BoundInputs: C must be >= 0");
  if (!(b >= 0.0)) throw std::invalid_argument("BoundInputs: B must be >= 0");
  if (d && !(*d >= 0.0)) throw std::invalid_argument("BoundInputs: D must be >= 0");
  if (gaps && gaps->arms() != arms) {
    throw std::invalid_argument("BoundInputs: gap profile size differs from K");
  }
}

CorruptionRange refined_corruption_range(double s, std::size_t arms, double horizon, double b) {
  const double k1 = static_cast<double>(arms) - 1.0;
  const double b2 = b * b;
  return {b2 * s * (std::log(horizon * k1 / (b2 * s * s)) + 1.0), horizon * k1 / s};
}

// -- theorem1_bounds ---------------------------------------------------------

Theorem1Bounds theorem1_bounds(const BoundInputs& in) {
  in.validate();
  const double k = static_cast<double>(in.arms);
  const double t = in.horizon;
  const double log_t = std::log(t);
  Theorem1Bounds out;
  out.adversarial = {2.0 * std::sqrt(k * t) + 10.0 * k * log_t + 16.0, true, {}};

  if (auto problem = gap_problem(in); !problem.empty()) {
    out.self_bounding = invalid(kNaN, problem);
    out.large_corruption = invalid(kNaN, problem);
    return out;
  }
  const double s = in.gaps->inverse_gap_sum();
  const double inv_dmin = 1.0 / in.gaps->delta_min();
  const double c = in.corruption;
  const double tail = 28.0 * k * log_t + 1.5 * std::sqrt(k) + 32.0;

  out.self_bounding = {(log_t + 3.0) * s + inv_dmin + tail + c, true, {}};

  const double threshold = (log_t + 3.0) * s + inv_dmin;
  const double large = 2.0 * std::sqrt(threshold * c) + tail;
  if (c >= threshold) {
    out.large_corruption = {large, true, {}};
  } else {
    out.large_corruption =
        invalid(large, "C below sum_i (log T + 3)/Delta_i + 1/Delta_min = " + format_double(threshold));
  }
  return out;
}

// -- theorem2_bounds ---------------------------------------------------------

Theorem2Bounds theorem2_bounds(const BoundInputs& in) {
  in.validate();
  const double k = static_cast<double>(in.arms);
  const double t = in.horizon;
  const double log_t = std::log(t);
  Theorem2Bounds out;
  out.adversarial = {2.0 * std::sqrt(km1(in) * t) + 0.5 * std::sqrt(t) + 14.0 * k * log_t +
                         0.75 * std::sqrt(k) + 15.0,
                     true,
                     {}};

  if (auto problem = gap_problem(in); !problem.empty()) {
    out.self_bounding = invalid(kNaN, problem);
    out.refined = invalid(kNaN, problem);
    return out;
  }
  const double s = in.gaps->inverse_gap_sum();
  const double c = in.corruption;
  const double tail = 28.0 * k * log_t + 1.5 * std::sqrt(k) + 30.0;

  const double sto = s * (std::log(t * km1(in) / (s * s)) + 6.0) + tail + c;
  if (t * km1(in) >= s * s) {
    out.self_bounding = {sto, true, {}};
  } else {
    out.self_bounding = invalid(sto, "T(K-1) < S^2");
  }

  const double l = std::max(0.0, std::log(t * km1(in) / (c * s)));
  const double q = s * (l + std::sqrt(2.0 * l) + 2.0) + tail;
  const double refined = std::sqrt(c * s) * (std::sqrt(l) + 5.0) + q;
  const auto range = refined_corruption_range(s, in.arms, t, 1.0);
  if (c < range.lower) {
    out.refined = invalid(refined, "C below S(log(T(K-1)/S^2) + 1) = " + format_double(range.lower));
  } else if (c > range.upper) {
    out.refined = invalid(refined, "C above T(K-1)/S = " + format_double(range.upper));
  } else {
    out.refined = {refined, true, {}};
  }
  return out;
}

// -- theorem3_bounds ---------------------------------------------------------

Theorem3Bounds theorem3_bounds(const BoundInputs& in) {
  in.validate();
  const double t = in.horizon;
  const double b = in.b;
  const double b2 = b * b;
  const double d = in.d_value();
  Theorem3Bounds out;
  out.adversarial = {2.0 * b * std::sqrt(km1(in) * t) + d, true, {}};

  if (auto problem = gap_problem(in); !problem.empty()) {
    out.self_bounding = invalid(kNaN, problem);
    out.refined = invalid(kNaN, problem);
    return out;
  }
  const double s = in.gaps->inverse_gap_sum();
  const double c = in.corruption;

  const double sto =
      b2 * s * (std::log(t * km1(in) / (s * s)) + 3.0 - 2.0 * std::log(b)) + c + 2.0 * d;
  if (t * km1(in) >= b2 * s * s) {
    out.self_bounding = {sto, true, {}};
  } else {
    out.self_bounding = invalid(sto, "T(K-1) < B^2 S^2");
  }

  const double l = std::max(0.0, std::log(t * km1(in) / (c * s)));
  const double m = b2 * s * (l + std::sqrt(2.0 * l) + 2.0) + 2.0 * d;
  const double refined = b * std::sqrt(c * s) * (std::sqrt(l) + 2.0) + m;
  const auto range = refined_corruption_range(s, in.arms, t, b);
  if (c < range.lower) {
    out.refined =
        invalid(refined, "C below B^2 S(log(T(K-1)/(B^2 S^2)) + 1) = " + format_double(range.lower));
  } else if (c > range.upper) {
    out.refined = invalid(refined, "C above T(K-1)/S = " + format_double(range.upper));
  } else {
    out.refined = {refined, true, {}};
  }
  return out;
}

// -- Scalar helpers -----------------------------------------------------------

double log_plus(double x) {
  if (!(x > 0.0)) throw DomainError("log_plus: argument must be positive");
  return std::max(1.0, std::log(x));
}

double lambert_w_minus1(double y) {
  if (!(y < 0.0) || y < -kInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    throw DomainError("lambert_w_minus1: argument outside [-1/e, 0)");
  }
  if (y <= -kInvE) return -1.0;

  // Solve phi(w) = w + log(-w) - log(-y) = 0 on w <= -1; phi is increasing
  // there. The bracket comes from the two-sided bound with x = -e y.
  const double log_neg_y = std::log(-y);
  const double u = -log_neg_y - 1.0;
  const double root2u = std::sqrt(2.0 * std::max(u, 0.0));
  double lo = -(1.0 + root2u + u) * (1.0 + 1e-12) - 1e-12;
  double hi = std::min(-1.0, -(1.0 + root2u + 2.0 * u / 3.0) * (1.0 - 1e-12));
  auto phi = [&](double w) { return w + std::log(-w) - log_neg_y; };
  while (phi(lo) > 0.0) lo *= 2.0;

  double w = 0.5 * (lo + hi);
  int iterations = 0;
  for (; iterations < kLambertIterationCap; ++iterations) {
    const double value = phi(w);
    if (value == 0.0) break;
    if (value > 0.0) {
      hi = w;
    } else {
      lo = w;
    }
    double next = w - value / (1.0 + 1.0 / w);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - w) <= 1e-16 * std::abs(w) || hi - lo <= 1e-16 * std::abs(w)) {
      w = next;
      break;
    }
    w = next;
  }
  const double residual = w * std::exp(w) - y;
  if (std::abs(residual) > kLambertResidual) {
    throw SolverError("lambert_w_minus1: residual above tolerance", residual, iterations);
  }
  return w;
}

std::pair<double, double> lambert_bounds(double x) {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("lambert_bounds: x must lie in (0, 1]");
  const double u = std::log(1.0 / x);
  const double base = 1.0 + std::sqrt(2.0 * u);
  return {base + 2.0 * u / 3.0, base + u};
}

QuadraticMaxResult lemma_opt_solve(double b, std::span<const double> c, double m) {
  if (!(b >= 0.0)) throw DomainError("lemma_opt_solve: b must be >= 0");
  if (!(m >= 0.0)) throw DomainError("lemma_opt_solve: M must be >= 0");
  if (c.empty()) throw DomainError("lemma_opt_solve: empty coefficient vector");
  double inv_sum = 0.0;
  for (double ci : c) {
    if (!(ci > 0.0)) throw DomainError("lemma_opt_solve: every c_i must be > 0");
    inv_sum += 1.0 / ci;
  }
  QuadraticMaxResult out;
  out.maximizer.resize(c.size());
  out.budget_active = 0.5 * b * inv_sum > m;
  if (out.budget_active) {
    for (std::size_t i = 0; i < c.size(); ++i) out.maximizer[i] = m / (c[i] * inv_sum);
    out.value = b * m - m * m / inv_sum;
  } else {
    for (std::size_t i = 0; i < c.size(); ++i) out.maximizer[i] = b / (2.0 * c[i]);
    out.value = 0.25 * b * b * inv_sum;
  }
  return out;
}

CorollarySum corollary_sum_check(double b, double c, std::uint64_t t0, std::uint64_t t) {
  if (!(b > 0.0) || !(c > 0.0)) throw DomainError("corollary_sum_check: b and c must be > 0");
  if (t0 >= t) throw DomainError("corollary_sum_check: need T0 < T");
  // Relative slack so that b computed as 2c / sqrt(T0) passes.
  if (!(b * std::sqrt(static_cast<double>(t0)) >= 2.0 * c * (1.0 - 1e-12))) {
    throw DomainError("corollary_sum_check: need b sqrt(T0) >= 2c");
  }
  // Smallest terms first.
  long double sum = 0.0L;
  for (std::uint64_t s = t; s > t0; --s) {
    const long double ts = static_cast<long double>(s);
    sum += 1.0L / (static_cast<long double>(b) * ts * std::sqrt(ts) - static_cast<long double>(c) * ts);
  }
  CorollarySum out;
  out.sum = static_cast<double>(sum);
  out.bound = 2.0 / c;
  out.holds = out.sum <= out.bound;
  return out;
}

// -- f, g, h ------------------------------------------------------------------

double f_eval(double alpha, double s, double c, std::size_t arms, double horizon) {
  require_positive(alpha, "alpha");
  require_positive(s, "S");
  require_arms(arms);
  const double lg = std::log(horizon * (static_cast<double>(arms) - 1.0) / (s * s));
  return s / alpha * (3.0 + lg) + 2.0 * s / alpha * std::log(alpha) + alpha * c;
}

double f_derivative(double alpha, double s, double c, std::size_t arms, double horizon) {
  require_positive(alpha, "alpha");
  require_positive(s, "S");
  require_arms(arms);
  const double lg = std::log((static_cast<double>(arms) - 1.0) * horizon / (s * s));
  return -1.0 / (alpha * alpha) *
         (2.0 * s * std::log(alpha) - c * alpha * alpha + s * lg + s);
}

double f_second_derivative(double alpha, double s, std::size_t arms, double horizon) {
  require_positive(alpha, "alpha");
  require_positive(s, "S");
  require_arms(arms);
  const double lg = std::log(horizon * (static_cast<double>(arms) - 1.0) / (s * s));
  return 2.0 * s / (alpha * alpha * alpha) * (2.0 * std::log(alpha) + lg);
}

double g_eval(double beta, double s, double c, std::size_t arms, double horizon) {
  require_positive(beta, "beta");
  require_arms(arms);
  return c * s / ((static_cast<double>(arms) - 1.0) * horizon) * beta - std::log(beta) - 1.0;
}

double h_eval(double b, double alpha, double s, double c, std::size_t arms, double horizon) {
  require_positive(b, "B");
  if (!(alpha > 0.0 && b * alpha < 2.0)) throw DomainError("h_eval: alpha must lie in (0, 2/B)");
  return b / (2.0 - b * alpha) * f_eval(alpha, s, c, arms, horizon);
}

// -- alpha* -------------------------------------------------------------------

SelfBoundingDiagnostics alpha_star(double s, double c, std::size_t arms, double horizon,
                                   double b, std::optional<double> delta_min) {
  require_positive(s, "S");
  require_positive(c, "C");
  require_positive(b, "B");
  require_arms(arms);
  const double k1 = static_cast<double>(arms) - 1.0;
  const auto range = refined_corruption_range(s, arms, horizon, b);
  constexpr double kSlack = 1e-12;
  if (c < range.lower * (1.0 - kSlack)) {
    throw DomainError("alpha_star: C = " + format_double(c) +
                      " violates C >= B^2 S (log(T(K-1)/(B^2 S^2)) + 1) = " +
                      format_double(range.lower));
  }
  if (c > range.upper * (1.0 + kSlack)) {
    throw DomainError("alpha_star: C = " + format_double(c) + " violates C <= T(K-1)/S = " +
                      format_double(range.upper));
  }
  const double x = std::min(1.0, c * s / (k1 * horizon));
  const double w = -lambert_w_minus1(-x * kInvE);

  SelfBoundingDiagnostics out;
  out.s = s;
  out.w = w;
  out.alpha_star = std::sqrt(s * w / c);
  out.alpha = out.alpha_star;
  out.lambda = b * out.alpha / (2.0 - b * out.alpha);
  const double lam = out.lambda;
  out.threshold_t0 = b * b * (lam + 1.0) * (lam + 1.0) * s * s / (4.0 * lam * lam * k1);
  out.threshold_t2 = s * s / (k1 * out.alpha * out.alpha);
  if (delta_min) {
    const double inv = 1.0 / (out.alpha * *delta_min);
    out.threshold_t1 = inv * inv;
  }
  return out;
}

HBoundChain h_bound_chain(double s, double c, std::size_t arms, double horizon, double b) {
  const auto diag = alpha_star(s, c, arms, horizon, b);
  const double a = diag.alpha_star;
  const double w = diag.w;
  const double cs = c * s;
  const double l = std::log(horizon * (static_cast<double>(arms) - 1.0) / cs);
  HBoundChain out;
  out.h_direct = h_eval(b, a, s, c, arms, horizon);
  out.h_substituted = b / (2.0 - b * a) * (2.0 * s / a + 2.0 * c * a);
  out.relaxed = b * (s / a + c * a + b * s + b * c * a * a);
  out.lambert_form = b * (std::sqrt(cs / w) + std::sqrt(cs * w) + b * s + b * s * w);
  out.closed_form = b * std::sqrt(cs) * (std::sqrt(l) + 2.0) +
                    b * b * s * (l + std::sqrt(2.0 * l) + 2.0);
  return out;
}

}  // namespace tsallis
