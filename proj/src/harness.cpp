#include "tsallis/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "tsallis/error.hpp"

namespace tsallis {

using nlohmann::json;

namespace {

// -- JSON helpers -------------------------------------------------------------

const json& require(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string(where) + ": missing required field \"" + key + "\"");
  }
  return obj.at(key);
}

template <class T>
T get_as(const json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

std::uint64_t get_count(const json& value, const char* key) {
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return value.get<std::uint64_t>();
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(std::string("field \"") + key + "\" must be a non-negative integer");
}

AttackPolicy parse_attack(const json& j, const std::vector<double>& means) {
  AttackPolicy policy;
  const auto best = static_cast<std::size_t>(
      std::min_element(means.begin(), means.end()) - means.begin());
  policy.best_arm = best;
  policy.target_arm = best == 0 ? 1 : 0;
  if (j.is_null()) return policy;
  const std::string kind = get_as<std::string>(require(j, "policy", "attack"), "policy");
  if (kind == "none") {
    policy.kind = AttackKind::kNone;
  } else if (kind == "frontload") {
    policy.kind = AttackKind::kFrontload;
  } else if (kind == "targeted_swap" || kind == "targeted-swap") {
    policy.kind = AttackKind::kTargetedSwap;
  } else if (kind == "random") {
    policy.kind = AttackKind::kRandom;
  } else {
    throw ConfigError("unknown attack policy \"" + kind + "\"");
  }
  if (j.contains("target_arm")) policy.target_arm = get_count(j.at("target_arm"), "target_arm");
  if (j.contains("probability")) policy.probability = get_as<double>(j.at("probability"), "probability");
  return policy;
}

EnvironmentSpec parse_environment(const json& j, std::size_t arms, std::size_t horizon,
                                  const std::filesystem::path& base_dir) {
  EnvironmentSpec env;
  env.arms = arms;
  env.horizon = horizon;
  const std::string regime = get_as<std::string>(require(j, "regime", "environment"), "regime");
  if (regime == "stochastic") {
    env.params = StochasticParams{
        get_as<std::vector<double>>(require(j, "means", "environment"), "means")};
  } else if (regime == "stochastically_constrained") {
    ConstrainedParams p;
    p.gaps = get_as<std::vector<double>>(require(j, "gaps", "environment"), "gaps");
    const std::string baseline =
        j.contains("baseline") ? get_as<std::string>(j.at("baseline"), "baseline") : "uniform";
    if (baseline == "uniform") {
      p.baseline = BaselineProcess::kUniform;
    } else if (baseline == "sinusoidal") {
      p.baseline = BaselineProcess::kSinusoidal;
      p.period = get_as<double>(require(j, "period", "environment"), "period");
    } else {
      throw ConfigError("unknown baseline process \"" + baseline + "\"");
    }
    env.params = std::move(p);
  } else if (regime == "adversarial_script") {
    const json& script = require(j, "script", "environment");
    if (script.is_string() && script.get<std::string>() == "alternating_leader") {
      env.params = ScriptParams{LossScript::alternating_leader(arms, horizon)};
    } else if (script.is_object() && script.contains("file")) {
      std::filesystem::path path = get_as<std::string>(script.at("file"), "file");
      if (path.is_relative()) path = base_dir / path;
      env.params = ScriptParams{LossScript::load(path, arms)};
    } else {
      throw ConfigError("script must be \"alternating_leader\" or {\"file\": path}");
    }
  } else if (regime == "corrupted_stochastic") {
    CorruptedParams p;
    p.means = get_as<std::vector<double>>(require(j, "means", "environment"), "means");
    p.budget = get_as<double>(require(j, "budget", "environment"), "budget");
    if (p.means.empty()) throw ConfigError("means must not be empty");
    p.attack = parse_attack(j.contains("attack") ? j.at("attack") : json(), p.means);
    env.params = std::move(p);
  } else {
    throw ConfigError("unknown regime \"" + regime + "\"");
  }
  env.validate();
  return env;
}

// -- Statistics ---------------------------------------------------------------

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::string cell(const BoundValue& b) { return b.valid ? format_number(b.value) : "NA"; }

}  // namespace

// -- Configuration ------------------------------------------------------------

void ExperimentConfig::validate() const {
  environment.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (checkpoints.empty()) throw ConfigError("at least one checkpoint is required");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw ConfigError("checkpoints must be sorted");
  }
  if (checkpoints.front() == 0 || checkpoints.back() > horizon()) {
    throw ConfigError("checkpoints must lie in [1, T]");
  }
  if (weights_stride == 0) throw ConfigError("weights_stride must be positive");
}

std::vector<std::uint64_t> expand_seeds(std::uint64_t master, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t j = 0; j < count; ++j) seeds[j] = derive_seed(master, j);
  return seeds;
}

std::vector<std::size_t> geometric_checkpoints(std::size_t horizon, unsigned levels) {
  std::vector<std::size_t> out;
  for (unsigned l = levels + 1; l-- > 0;) {
    const std::size_t c = std::max<std::size_t>(1, horizon >> l);
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  const std::size_t arms = get_count(require(j, "arms", "config"), "arms");
  const std::size_t horizon = get_count(require(j, "horizon", "config"), "horizon");
  cfg.environment = parse_environment(require(j, "environment", "config"), arms, horizon, base_dir);

  const json& seeds = require(j, "seeds", "config");
  if (seeds.is_array()) {
    for (const auto& s : seeds) cfg.seeds.push_back(get_count(s, "seeds"));
  } else if (seeds.is_object()) {
    cfg.seeds = expand_seeds(get_count(require(seeds, "master", "seeds"), "master"),
                             get_count(require(seeds, "count", "seeds"), "count"));
  } else {
    throw ConfigError("seeds must be a list or {\"master\", \"count\"}");
  }

  for (const auto& c : require(j, "checkpoints", "config")) {
    cfg.checkpoints.push_back(get_count(c, "checkpoints"));
  }

  const json& learner = require(j, "learner", "config");
  const std::string estimator =
      get_as<std::string>(require(learner, "estimator", "learner"), "estimator");
  if (estimator == "reduced_variance") {
    cfg.learner.estimator = EstimatorKind::kReducedVariance;
  } else if (estimator == "importance_weighted") {
    cfg.learner.estimator = EstimatorKind::kImportanceWeighted;
  } else {
    throw ConfigError("unknown estimator \"" + estimator + "\"");
  }

  if (j.contains("output")) {
    const json& out = j.at("output");
    if (out.contains("dir")) cfg.output_dir = get_as<std::string>(out.at("dir"), "dir");
    if (out.contains("regret_csv")) cfg.regret_file = get_as<std::string>(out.at("regret_csv"), "regret_csv");
    if (out.contains("weights_csv")) cfg.weights_file = get_as<std::string>(out.at("weights_csv"), "weights_csv");
    if (out.contains("weights_stride")) cfg.weights_stride = get_count(out.at("weights_stride"), "weights_stride");
  }
  if (j.contains("threads")) cfg.threads = static_cast<unsigned>(get_count(j.at("threads"), "threads"));
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
}

// -- Episodes -----------------------------------------------------------------

RegretTrace run_episode(const EnvironmentSpec& env, const LearnerSpec& learner_spec,
                        std::uint64_t seed) {
  const std::size_t k = env.arms;
  const std::size_t horizon = env.horizon;
  TsallisInf learner(k, learner_spec.estimator);
  Rng learner_rng = make_stream(seed, Stream::kLearner);
  LossGenerator generator(env, seed);
  const bool keep_reference = env.needs_reference();

  RegretTrace trace;
  trace.horizon = horizon;
  trace.arms = k;
  trace.actions.reserve(horizon);
  trace.incurred_losses.reserve(horizon);
  trace.weight_sums.reserve(horizon * k);
  if (keep_reference) trace.reference_losses.reserve(horizon * k);

  for (std::size_t t = 1; t <= horizon; ++t) {
    LossDraw draw = generator.sample_losses(t, trace.actions);
    StepOutcome out;
    try {
      out = learner.step(draw.losses, learner_rng);
    } catch (const SolverError& e) {
      throw SolverError("seed " + std::to_string(seed) + ", round " + std::to_string(t) + ": " +
                            e.what(),
                        e.residual(), e.iterations());
    }
    trace.actions.push_back(out.arm);
    trace.incurred_losses.push_back(out.loss);
    trace.weight_sums.insert(trace.weight_sums.end(), out.weights.weights.begin(),
                             out.weights.weights.end());
    if (keep_reference) {
      trace.reference_losses.insert(trace.reference_losses.end(), draw.reference.begin(),
                                    draw.reference.end());
    }
  }
  trace.cumulative_pseudo_regret = pseudo_regret(trace, env);
  return trace;
}

AggregateResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t horizon = config.horizon();
  const std::size_t k = config.arms();
  const std::size_t n = config.seeds.size();

  AggregateResult result;
  result.horizon = horizon;
  result.arms = k;
  result.seed_count = n;
  result.checkpoints = config.checkpoints;
  if (const auto gaps = config.environment.gap_profile()) result.best_arm = gaps->best_arm();
  result.mean_weights.assign(horizon * k, 0.0);
  result.final_regrets.reserve(n);

  std::vector<std::vector<double>> at_checkpoint(config.checkpoints.size());

  // Seeds run in batches of `threads`; each batch is reduced in seed order,
  // so floating-point sums do not depend on scheduling.
  const std::size_t batch = std::max<std::size_t>(1, config.threads);
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t stop = std::min(n, start + batch);
    std::vector<RegretTrace> traces(stop - start);
    std::vector<std::exception_ptr> errors(stop - start);
    auto work = [&](std::size_t idx) {
      try {
        traces[idx - start] = run_episode(config.environment, config.learner, config.seeds[idx]);
      } catch (...) {
        errors[idx - start] = std::current_exception();
      }
    };
    if (stop - start == 1) {
      work(start);
    } else {
      std::vector<std::jthread> workers;
      for (std::size_t idx = start; idx < stop; ++idx) workers.emplace_back(work, idx);
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (const RegretTrace& trace : traces) {
      for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
        at_checkpoint[c].push_back(trace.cumulative_pseudo_regret[config.checkpoints[c] - 1]);
      }
      result.final_regrets.push_back(trace.cumulative_pseudo_regret.back());
      for (std::size_t i = 0; i < horizon * k; ++i) result.mean_weights[i] += trace.weight_sums[i];
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& w : result.mean_weights) w *= inv_n;
  for (const auto& values : at_checkpoint) {
    const double m = mean_of(values);
    result.mean_regret.push_back(m);
    result.stderr_regret.push_back(stderr_of(values, m));
  }
  result.bounds = bound_overlay(overlay_inputs(config.environment), config.checkpoints);
  return result;
}

// -- Bounds -------------------------------------------------------------------

BoundInputs overlay_inputs(const EnvironmentSpec& env) {
  BoundInputs in;
  in.arms = env.arms;
  in.horizon = static_cast<double>(env.horizon);
  in.gaps = env.gap_profile();
  if (env.regime() == Regime::kCorruptedStochastic) {
    in.corruption = 2.0 * std::get<CorruptedParams>(env.params).budget;
  }
  in.b = kTsallisB;
  return in;
}

std::vector<BoundRow> bound_overlay(const BoundInputs& inputs,
                                    const std::vector<std::size_t>& checkpoints) {
  std::vector<BoundRow> rows;
  rows.reserve(checkpoints.size());
  for (std::size_t c : checkpoints) {
    BoundInputs at = inputs;
    at.horizon = static_cast<double>(c);
    rows.push_back({c, theorem1_bounds(at), theorem2_bounds(at), theorem3_bounds(at)});
  }
  return rows;
}

SqrtConditionReport verify_sqrt_condition(const AggregateResult& result, double b, double d) {
  if (!result.best_arm) throw UnsupportedError("verify_sqrt_condition: best arm unknown");
  if (result.mean_weights.size() != result.horizon * result.arms || result.final_regrets.empty()) {
    throw std::invalid_argument("verify_sqrt_condition: mean weights not populated");
  }
  const std::size_t best = *result.best_arm;
  const std::size_t k = result.arms;
  double sqrt_sum = 0.0;
  double linear_sum = 0.0;
  for (std::size_t t = 1; t <= result.horizon; ++t) {
    const double inv_sqrt_t = 1.0 / std::sqrt(static_cast<double>(t));
    for (std::size_t i = 0; i < k; ++i) {
      if (i == best) continue;
      const double m = result.mean_weights[(t - 1) * k + i];
      sqrt_sum += std::sqrt(m) * inv_sqrt_t;
      linear_sum += m * inv_sqrt_t;
    }
  }
  SqrtConditionReport r;
  r.measured = mean_of(result.final_regrets);
  r.measured_stderr = stderr_of(result.final_regrets, r.measured);
  r.bound = b * sqrt_sum + d;
  const double kd = static_cast<double>(k);
  r.refined_bound = sqrt_sum + 0.25 * linear_sum +
                    14.0 * kd * std::log(static_cast<double>(result.horizon)) +
                    0.75 * std::sqrt(kd) + 15.0;
  r.holds = r.measured - 2.0 * r.measured_stderr <= r.bound;
  r.refined_holds = r.measured - 2.0 * r.measured_stderr <= r.refined_bound;
  return r;
}

// -- Regime table -------------------------------------------------------------

RegimeGrid parse_regime_grid(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("grid is not valid JSON: ") + e.what());
  }
  RegimeGrid grid;
  for (const auto& k : require(j, "arms", "grid")) grid.arms.push_back(get_count(k, "arms"));
  grid.horizons = get_as<std::vector<double>>(require(j, "horizons", "grid"), "horizons");
  grid.gap_profiles =
      get_as<std::vector<std::vector<double>>>(require(j, "gap_profiles", "grid"), "gap_profiles");
  grid.corruptions = get_as<std::vector<double>>(require(j, "corruptions", "grid"), "corruptions");
  if (j.contains("include_loglog_row")) {
    grid.include_loglog_row = get_as<bool>(j.at("include_loglog_row"), "include_loglog_row");
  }
  for (double t : grid.horizons) {
    if (!(t >= 3.0)) throw ConfigError("grid horizons must be >= 3");
  }
  for (double c : grid.corruptions) {
    if (!(c >= 0.0)) throw ConfigError("grid corruptions must be >= 0");
  }
  for (const auto& g : grid.gap_profiles) {
    try {
      GapProfile p(g);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("gap profile: ") + e.what());
    }
  }
  return grid;
}

std::vector<RegimeCell> regime_table(const RegimeGrid& grid) {
  std::vector<RegimeCell> cells;
  for (std::size_t k : grid.arms) {
    for (double t : grid.horizons) {
      for (const auto& gaps : grid.gap_profiles) {
        if (gaps.size() != k) continue;
        const GapProfile profile(gaps);
        const double s = profile.inverse_gap_sum();
        const double kd = static_cast<double>(k);
        const double small_c_limit = s * (std::log(t * (kd - 1.0) / (s * s)) + 1.0);

        std::vector<std::pair<double, std::string>> rows;
        for (double c : grid.corruptions) {
          rows.emplace_back(c, c <= small_c_limit ? "small_c" : "large_c");
        }
        if (grid.include_loglog_row && std::isfinite(s)) {
          rows.emplace_back(t * kd / (std::log(t) * s), "loglog");
        }

        for (const auto& [c, label] : rows) {
          BoundInputs in;
          in.arms = k;
          in.horizon = t;
          in.gaps = profile;
          in.corruption = c;
          const auto t1 = theorem1_bounds(in);
          const auto t2 = theorem2_bounds(in);
          RegimeCell cellv;
          cellv.arms = k;
          cellv.horizon = t;
          cellv.s = s;
          cellv.corruption = c;
          cellv.row = label;
          cellv.old_self_bounding = t1.self_bounding;
          cellv.new_self_bounding = t2.self_bounding;
          cellv.old_large_c = t1.large_corruption;
          cellv.new_large_c = t2.refined;
          if (t1.self_bounding.valid && t2.self_bounding.valid) {
            cellv.ratio_self_bounding = t1.self_bounding.value / t2.self_bounding.value;
          }
          if (t1.large_corruption.valid && t2.refined.valid) {
            cellv.ratio_large_c = t1.large_corruption.value / t2.refined.value;
          }
          cellv.loglog_reference = std::sqrt(std::log(t) / std::log(std::log(t)));
          cells.push_back(std::move(cellv));
        }
      }
    }
  }
  return cells;
}

// -- CSV ----------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_regret_csv(const AggregateResult& result, std::ostream& out) {
  out << "checkpoint,mean_regret,stderr,bound_t1_adv,bound_t1_sto,bound_t1_stoC,"
         "bound_t2_adv,bound_t2_sto,bound_t2_stoC,bound_t3_adv,bound_t3_sto,bound_t3_stoC\n";
  for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
    const BoundRow& b = result.bounds[c];
    out << result.checkpoints[c] << ',' << format_number(result.mean_regret[c]) << ','
        << format_number(result.stderr_regret[c]) << ',' << cell(b.t1.adversarial) << ','
        << cell(b.t1.self_bounding) << ',' << cell(b.t1.large_corruption) << ','
        << cell(b.t2.adversarial) << ',' << cell(b.t2.self_bounding) << ','
        << cell(b.t2.refined) << ',' << cell(b.t3.adversarial) << ','
        << cell(b.t3.self_bounding) << ',' << cell(b.t3.refined) << '\n';
  }
}

void write_weights_csv(const AggregateResult& result, std::size_t stride, std::ostream& out) {
  if (stride == 0) throw std::invalid_argument("weights stride must be positive");
  out << "round";
  for (std::size_t i = 0; i < result.arms; ++i) out << ",w" << i;
  out << '\n';
  for (std::size_t t = 1; t <= result.horizon; t += stride) {
    out << t;
    for (std::size_t i = 0; i < result.arms; ++i) {
      out << ',' << format_number(result.mean_weights[(t - 1) * result.arms + i]);
    }
    out << '\n';
  }
}

void write_regime_csv(const std::vector<RegimeCell>& cells, std::ostream& out) {
  out << "K,T,S,C,row,old_sto,new_sto,ratio_sto,old_stoC,new_stoC,ratio_stoC,loglog_reference\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); };
  for (const auto& c : cells) {
    out << c.arms << ',' << format_number(c.horizon) << ',' << format_number(c.s) << ','
        << format_number(c.corruption) << ',' << c.row << ',' << cell(c.old_self_bounding) << ','
        << cell(c.new_self_bounding) << ',' << opt(c.ratio_self_bounding) << ','
        << cell(c.old_large_c) << ',' << cell(c.new_large_c) << ',' << opt(c.ratio_large_c) << ','
        << format_number(c.loglog_reference) << '\n';
  }
}

void write_outputs(const AggregateResult& result, const ExperimentConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  {
    std::ofstream out(config.output_dir / config.regret_file, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (config.output_dir / config.regret_file).string());
    write_regret_csv(result, out);
  }
  std::ofstream out(config.output_dir / config.weights_file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (config.output_dir / config.weights_file).string());
  write_weights_csv(result, config.weights_stride, out);
}

}  // namespace tsallis
