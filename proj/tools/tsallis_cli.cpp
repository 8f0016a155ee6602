// tsallis: run bandit experiments, evaluate regret bounds, print the regime
// table and run the numeric lemma checks.
//
// Exit codes: 0 ok, 1 configuration error, 2 solver failure, 3 a
// verify-lemmas check failed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tsallis/bounds.hpp"
#include "tsallis/error.hpp"
#include "tsallis/harness.hpp"
#include "tsallis/verification.hpp"

namespace {

using nlohmann::json;
using namespace tsallis;

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kCheckFailed = 3 };

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Accepts a path to a JSON file or an inline JSON object.
std::string file_or_inline(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return arg;
  return read_file(arg);
}

json to_json(const BoundValue& b) {
  json j;
  j["value"] = b.valid ? json(b.value) : json(nullptr);
  j["valid"] = b.valid;
  if (!b.valid) j["reason"] = b.validity_reason;
  return j;
}

json bounds_report(const std::string& text) {
  json p;
  try {
    p = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("bounds parameters are not valid JSON: ") + e.what());
  }
  BoundInputs in;
  try {
    in.arms = p.at("arms").get<std::size_t>();
    in.horizon = p.at("horizon").get<double>();
    if (p.contains("gaps")) in.gaps = GapProfile(p.at("gaps").get<std::vector<double>>());
    if (p.contains("corruption")) in.corruption = p.at("corruption").get<double>();
    if (p.contains("b")) in.b = p.at("b").get<double>();
    if (p.contains("d")) in.d = p.at("d").get<double>();
    in.validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bounds parameters: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("bounds parameters: ") + e.what());
  }

  const auto t1 = theorem1_bounds(in);
  const auto t2 = theorem2_bounds(in);
  const auto t3 = theorem3_bounds(in);
  json out;
  out["inputs"] = {{"arms", in.arms}, {"horizon", in.horizon}, {"corruption", in.corruption},
                   {"b", in.b}, {"d", in.d_value()}};
  out["theorem1"] = {{"adversarial", to_json(t1.adversarial)},
                     {"self_bounding", to_json(t1.self_bounding)},
                     {"large_corruption", to_json(t1.large_corruption)}};
  out["theorem2"] = {{"adversarial", to_json(t2.adversarial)},
                     {"self_bounding", to_json(t2.self_bounding)},
                     {"refined", to_json(t2.refined)}};
  out["theorem3"] = {{"adversarial", to_json(t3.adversarial)},
                     {"self_bounding", to_json(t3.self_bounding)},
                     {"refined", to_json(t3.refined)}};

  if (in.gaps && in.gaps->unique_best()) {
    const double s = in.gaps->inverse_gap_sum();
    const auto r2 = refined_corruption_range(s, in.arms, in.horizon, 1.0);
    const auto r3 = refined_corruption_range(s, in.arms, in.horizon, in.b);
    out["s"] = s;
    out["refined_range"] = {{"theorem2", {r2.lower, r2.upper}}, {"theorem3", {r3.lower, r3.upper}}};
    if (in.corruption >= r3.lower && in.corruption <= r3.upper && in.corruption > 0.0) {
      const auto diag =
          alpha_star(s, in.corruption, in.arms, in.horizon, in.b, in.gaps->delta_min());
      json a = {{"alpha_star", diag.alpha_star}, {"alpha", diag.alpha}, {"lambda", diag.lambda},
                {"w", diag.w}, {"threshold_t0", diag.threshold_t0},
                {"threshold_t2", diag.threshold_t2}};
      if (diag.threshold_t1) a["threshold_t1"] = *diag.threshold_t1;
      out["alpha_star"] = a;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tsallis-INF bandit experiments and regret bounds"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  app.add_option("--seed", seed, "Master seed; replaces the config's seed list with as many derived seeds");
  app.add_option("--out-dir", out_dir, "Output directory (overrides the config)");
  app.add_option("--threads", threads, "Worker threads for seed-parallel runs")->check(CLI::PositiveNumber);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a multi-seed experiment and write CSV files");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();

  std::string params;
  auto* bounds = app.add_subcommand("bounds", "Evaluate every bound for one parameter set; prints JSON");
  bounds->add_option("params", params, "JSON file or inline JSON object")->required();

  std::string grid_path;
  auto* table = app.add_subcommand("table", "Old vs new bound comparison over a grid; prints CSV");
  table->add_option("grid", grid_path, "Grid config (JSON file or inline object)")->required();
  std::optional<std::string> table_out;
  table->add_option("-o,--output", table_out, "Write the CSV here instead of stdout");

  std::optional<std::size_t> trials;
  auto* verify = app.add_subcommand("verify-lemmas", "Check closed forms against numeric oracles");
  verify->add_option("--trials", trials, "Instances per check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      if (seed) cfg.seeds = expand_seeds(*seed, cfg.seeds.size());
      if (out_dir) cfg.output_dir = *out_dir;
      if (threads) cfg.threads = *threads;
      const AggregateResult result = run_experiment(cfg);
      write_outputs(result, cfg);
      std::printf("%zu seeds, T=%zu, K=%zu: mean regret %s (stderr %s) -> %s\n", result.seed_count,
                  result.horizon, result.arms, format_number(result.mean_regret.back()).c_str(),
                  format_number(result.stderr_regret.back()).c_str(),
                  (cfg.output_dir / cfg.regret_file).string().c_str());
      if (result.best_arm) {
        const double t = static_cast<double>(result.horizon);
        const auto sq = verify_sqrt_condition(result, kTsallisB,
                                              tsallis_default_d(result.arms, t));
        std::printf("sqrt condition: L=%s R=%s refined R=%s holds=%d refined_holds=%d\n",
                    format_number(sq.measured).c_str(), format_number(sq.bound).c_str(),
                    format_number(sq.refined_bound).c_str(), sq.holds ? 1 : 0,
                    sq.refined_holds ? 1 : 0);
      }
    } else if (*bounds) {
      std::cout << bounds_report(file_or_inline(params)).dump(2) << '\n';
    } else if (*table) {
      const auto cells = regime_table(parse_regime_grid(file_or_inline(grid_path)));
      if (table_out) {
        std::ofstream out(*table_out, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + *table_out);
        write_regime_csv(cells, out);
      } else {
        write_regime_csv(cells, std::cout);
      }
    } else if (*verify) {
      LemmaSuiteOptions opts;
      if (seed) opts.seed = *seed;
      opts.trials = trials;
      bool ok = true;
      for (const auto& r : run_lemma_suite(opts)) {
        std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
      }
      return ok ? kOk : kCheckFailed;
    }
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s (residual %g after %d iterations)\n", e.what(),
                 e.residual(), e.iterations());
    return kSolver;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
  return kOk;
}
