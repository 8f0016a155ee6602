#include "tsallis/environments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tsallis/error.hpp"

namespace tsallis {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double linf_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

void check_unit_interval(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ConfigError(std::string(what) + ": value outside [0,1]");
    }
  }
}

std::vector<double> bernoulli_draw(std::span<const double> means, Rng& rng) {
  std::vector<double> out(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    out[i] = uniform01(rng) < means[i] ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kStochastic:
      return "stochastic";
    case Regime::kStochasticallyConstrained:
      return "stochastically_constrained";
    case Regime::kAdversarialScript:
      return "adversarial_script";
    case Regime::kCorruptedStochastic:
      return "corrupted_stochastic";
  }
  return "unknown";
}

// -- CorruptionLedger ---------------------------------------------------------

CorruptionLedger::CorruptionLedger(double budget) : budget_(budget) {
  if (!(budget >= 0.0)) throw std::invalid_argument("corruption budget must be >= 0");
}

bool CorruptionLedger::try_spend(double amount) {
  if (amount > budget_ - spent_) return false;
  spent_ += amount;
  return true;
}

std::vector<double> corruption_attack(const AttackPolicy& policy,
                                      std::span<const double> clean_losses,
                                      CorruptionLedger& ledger, std::size_t /*t*/, Rng& rng) {
  std::vector<double> out(clean_losses.begin(), clean_losses.end());
  const std::size_t k = out.size();
  switch (policy.kind) {
    case AttackKind::kNone:
      return out;
    case AttackKind::kFrontload:
      if (policy.best_arm >= k) throw std::out_of_range("attack: best arm out of range");
      out[policy.best_arm] = 1.0;
      break;
    case AttackKind::kTargetedSwap:
      if (policy.best_arm >= k || policy.target_arm >= k) {
        throw std::out_of_range("attack: arm out of range");
      }
      out[policy.target_arm] = 0.0;
      out[policy.best_arm] = 1.0;
      break;
    case AttackKind::kRandom: {
      // Two draws every round keep the stream aligned regardless of budget.
      const double coin = uniform01(rng);
      const double value = uniform01(rng);
      const auto arm = static_cast<std::size_t>(rng() % k);
      if (coin < policy.probability) out[arm] = value;
      break;
    }
  }
  const double cost = linf_distance(out, clean_losses);
  if (cost == 0.0 || !ledger.try_spend(cost)) {
    return std::vector<double>(clean_losses.begin(), clean_losses.end());
  }
  return out;
}

// -- LossScript ---------------------------------------------------------------

LossScript::LossScript(std::size_t arms, std::vector<double> row_major)
    : arms_(arms), values_(std::move(row_major)) {
  if (arms_ == 0) throw ConfigError("loss script: zero arms");
  if (values_.size() % arms_ != 0) throw ConfigError("loss script: ragged matrix");
  check_unit_interval(values_, "loss script");
}

LossScript LossScript::parse(std::istream& in, std::size_t arms) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::size_t count = 0;
    double v;
    while (row >> v) {
      values.push_back(v);
      ++count;
    }
    if (!row.eof() || count != arms) {
      throw ConfigError("loss script line " + std::to_string(line_no) + ": expected " +
                        std::to_string(arms) + " reals");
    }
  }
  return LossScript(arms, std::move(values));
}

LossScript LossScript::load(const std::filesystem::path& path, std::size_t arms) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open loss script " + path.string());
  return parse(in, arms);
}

LossScript LossScript::alternating_leader(std::size_t arms, std::size_t horizon) {
  if (arms < 2 || horizon == 0) throw ConfigError("alternating_leader: need K >= 2, T >= 1");
  const auto block =
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(horizon))));
  std::vector<double> values(arms * horizon, 1.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t leader = (t / block) % arms;
    values[t * arms + leader] = 0.0;
  }
  return LossScript(arms, std::move(values));
}

std::span<const double> LossScript::row(std::size_t t) const {
  if (t == 0 || t > rows()) throw ConfigError("loss script exhausted at round " + std::to_string(t));
  return {values_.data() + (t - 1) * arms_, arms_};
}

// -- EnvironmentSpec ----------------------------------------------------------

Regime EnvironmentSpec::regime() const {
  return std::visit(Overloaded{
                        [](const StochasticParams&) { return Regime::kStochastic; },
                        [](const ConstrainedParams&) { return Regime::kStochasticallyConstrained; },
                        [](const ScriptParams&) { return Regime::kAdversarialScript; },
                        [](const CorruptedParams&) { return Regime::kCorruptedStochastic; },
                    },
                    params);
}

std::optional<GapProfile> EnvironmentSpec::gap_profile() const {
  return std::visit(Overloaded{
                        [](const StochasticParams& p) -> std::optional<GapProfile> {
                          return GapProfile::from_means(p.means);
                        },
                        [](const ConstrainedParams& p) -> std::optional<GapProfile> {
                          return GapProfile(p.gaps);
                        },
                        [](const ScriptParams&) -> std::optional<GapProfile> { return {}; },
                        [](const CorruptedParams& p) -> std::optional<GapProfile> {
                          return GapProfile::from_means(p.means);
                        },
                    },
                    params);
}

bool EnvironmentSpec::needs_reference() const {
  const Regime r = regime();
  return r == Regime::kAdversarialScript || r == Regime::kCorruptedStochastic;
}

void EnvironmentSpec::validate() const {
  if (arms < 2) throw ConfigError("environment needs at least two arms");
  if (horizon == 0) throw ConfigError("horizon must be positive");
  auto check_size = [&](std::size_t n, const char* what) {
    if (n != arms) {
      throw ConfigError(std::string(what) + " has " + std::to_string(n) + " entries, expected " +
                        std::to_string(arms));
    }
  };
  std::visit(Overloaded{
                 [&](const StochasticParams& p) {
                   check_size(p.means.size(), "means");
                   check_unit_interval(p.means, "means");
                 },
                 [&](const ConstrainedParams& p) {
                   check_size(p.gaps.size(), "gaps");
                   check_unit_interval(p.gaps, "gaps");
                   try {
                     GapProfile g(p.gaps);
                   } catch (const DomainError& e) {
                     throw ConfigError(e.what());
                   }
                   if (p.baseline == BaselineProcess::kSinusoidal && !(p.period > 0.0)) {
                     throw ConfigError("sinusoidal baseline needs a positive period");
                   }
                 },
                 [&](const ScriptParams& p) {
                   if (const auto* script = std::get_if<LossScript>(&p.source)) {
                     check_size(script->arms(), "loss script");
                     if (script->rows() < horizon) {
                       throw ConfigError("loss script has " + std::to_string(script->rows()) +
                                         " rows, horizon is " + std::to_string(horizon));
                     }
                   } else if (!std::get<AdaptiveScript>(p.source)) {
                     throw ConfigError("adaptive script is empty");
                   }
                 },
                 [&](const CorruptedParams& p) {
                   check_size(p.means.size(), "means");
                   check_unit_interval(p.means, "means");
                   if (!(p.budget >= 0.0)) throw ConfigError("corruption budget must be >= 0");
                   if (p.attack.best_arm >= arms || p.attack.target_arm >= arms) {
                     throw ConfigError("attack arm out of range");
                   }
                 },
             },
             params);
}

// -- LossGenerator ------------------------------------------------------------

LossGenerator::LossGenerator(const EnvironmentSpec& spec, std::uint64_t episode_seed)
    : spec_(&spec),
      env_rng_(make_stream(episode_seed, Stream::kEnvironment)),
      attack_rng_(make_stream(episode_seed, Stream::kAttack)),
      ledger_(spec.regime() == Regime::kCorruptedStochastic
                  ? std::get<CorruptedParams>(spec.params).budget
                  : 0.0) {}

LossDraw LossGenerator::sample_losses(std::size_t t, std::span<const std::size_t> history) {
  if (t == 0 || t > spec_->horizon) throw std::out_of_range("round outside [1, T]");
  LossDraw draw;
  std::visit(
      Overloaded{
          [&](const StochasticParams& p) { draw.losses = bernoulli_draw(p.means, env_rng_); },
          [&](const ConstrainedParams& p) {
            const double max_gap = *std::max_element(p.gaps.begin(), p.gaps.end());
            const double span = 1.0 - max_gap;
            double b;
            if (p.baseline == BaselineProcess::kUniform) {
              b = span * uniform01(env_rng_);
            } else {
              b = span * 0.5 *
                  (1.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / p.period));
            }
            draw.losses.resize(p.gaps.size());
            for (std::size_t i = 0; i < p.gaps.size(); ++i) {
              draw.losses[i] = std::clamp(b + p.gaps[i], 0.0, 1.0);
            }
          },
          [&](const ScriptParams& p) {
            if (const auto* script = std::get_if<LossScript>(&p.source)) {
              const auto row = script->row(t);
              draw.losses.assign(row.begin(), row.end());
            } else {
              draw.losses = std::get<AdaptiveScript>(p.source)(t, history);
              if (draw.losses.size() != spec_->arms) {
                throw ConfigError("adaptive script returned a vector of the wrong length");
              }
              for (double& v : draw.losses) v = std::clamp(v, 0.0, 1.0);
            }
            draw.reference = draw.losses;
          },
          [&](const CorruptedParams& p) {
            draw.clean = bernoulli_draw(p.means, env_rng_);
            draw.losses = corruption_attack(p.attack, draw.clean, ledger_, t, attack_rng_);
            // mu + (corrupted - clean) is an unbiased estimate of the expected
            // corrupted loss given the past.
            draw.reference.resize(p.means.size());
            for (std::size_t i = 0; i < p.means.size(); ++i) {
              draw.reference[i] = p.means[i] + (draw.losses[i] - draw.clean[i]);
            }
          },
      },
      spec_->params);
  return draw;
}

// -- Regret -------------------------------------------------------------------

std::vector<double> gap_regret(const RegretTrace& trace, const GapProfile& gaps) {
  std::vector<double> out(trace.actions.size());
  double total = 0.0;
  for (std::size_t t = 0; t < trace.actions.size(); ++t) {
    total += gaps[trace.actions[t]];
    out[t] = total;
  }
  return out;
}

namespace {

std::vector<double> reference_regret(std::span<const std::size_t> actions, std::size_t arms,
                                     const std::function<std::span<const double>(std::size_t)>& row) {
  std::vector<double> out(actions.size());
  std::vector<double> per_arm(arms, 0.0);
  double learner = 0.0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const auto r = row(t);
    for (std::size_t i = 0; i < arms; ++i) per_arm[i] += r[i];
    learner += r[actions[t]];
    out[t] = learner - *std::min_element(per_arm.begin(), per_arm.end());
  }
  return out;
}

}  // namespace

std::vector<double> pseudo_regret(const RegretTrace& trace, const EnvironmentSpec& spec) {
  const Regime regime = spec.regime();
  if (regime == Regime::kStochastic || regime == Regime::kStochasticallyConstrained) {
    return gap_regret(trace, *spec.gap_profile());
  }
  const std::size_t k = spec.arms;
  if (trace.reference_losses.size() == trace.actions.size() * k && !trace.actions.empty()) {
    return reference_regret(trace.actions, k, [&](std::size_t t) {
      return std::span<const double>(trace.reference_losses.data() + t * k, k);
    });
  }
  if (regime == Regime::kAdversarialScript) {
    const auto& source = std::get<ScriptParams>(spec.params).source;
    if (const auto* script = std::get_if<LossScript>(&source)) {
      return reference_regret(trace.actions, k,
                              [&](std::size_t t) { return script->row(t + 1); });
    }
  }
  throw UnsupportedError("pseudo_regret: " + to_string(regime) +
                         " trace carries no reference losses");
}

}  // namespace tsallis
