#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tsallis/bandit_core.hpp"
#include "tsallis/bounds.hpp"
#include "tsallis/error.hpp"
#include "tsallis/harness.hpp"
#include "tsallis/verification.hpp"

namespace py = pybind11;
using namespace tsallis;

namespace {

py::object bound_value(const BoundValue& b) {
  if (!b.valid) return py::none();
  return py::float_(b.value);
}

class Learner {
 public:
  Learner(std::size_t arms, const std::string& estimator, std::uint64_t seed)
      : learner_(arms, parse_estimator(estimator)), rng_(make_stream(seed, Stream::kLearner)) {}

  py::tuple step(const std::vector<double>& losses) {
    if (losses.size() != learner_.arms()) throw py::value_error("loss vector has the wrong length");
    const StepOutcome out = learner_.step(losses, rng_);
    return py::make_tuple(out.arm, out.loss, out.weights.weights);
  }

  std::vector<double> weights() const { return learner_.current_weights().weights; }
  std::uint64_t round() const { return learner_.state().round; }
  std::vector<double> cumulative_estimates() const {
    return learner_.state().cumulative_estimates;
  }

 private:
  static EstimatorKind parse_estimator(const std::string& name) {
    if (name == "reduced_variance") return EstimatorKind::kReducedVariance;
    if (name == "importance_weighted") return EstimatorKind::kImportanceWeighted;
    throw py::value_error("estimator must be 'reduced_variance' or 'importance_weighted'");
  }

  TsallisInf learner_;
  Rng rng_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tsallis-INF core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("learning_rate", &learning_rate, py::arg("t"));
  m.def(
      "tsallis_weights",
      [](const std::vector<double>& l, double eta) { return tsallis_weights(l, eta).weights; },
      py::arg("cumulative_estimates"), py::arg("eta"));
  m.def(
      "reduced_variance_estimate",
      [](const std::vector<double>& w, std::size_t played, double loss, double eta) {
        return reduced_variance_estimate(ArmDistribution{w}, played, loss, eta).values;
      },
      py::arg("weights"), py::arg("played"), py::arg("loss"), py::arg("eta"));
  m.def("lambert_w_minus1", &lambert_w_minus1, py::arg("y"));
  m.def(
      "quadratic_max",
      [](double b, const std::vector<double>& c, double budget) {
        const auto r = lemma_opt_solve(b, c, budget);
        return py::make_tuple(r.value, r.maximizer, r.budget_active);
      },
      py::arg("b"), py::arg("c"), py::arg("budget"));

  m.def(
      "bounds",
      [](std::size_t arms, double horizon, std::optional<std::vector<double>> gaps,
         double corruption) {
        BoundInputs in;
        in.arms = arms;
        in.horizon = horizon;
        if (gaps) in.gaps = GapProfile(*gaps);
        in.corruption = corruption;
        in.validate();
        const auto t1 = theorem1_bounds(in);
        const auto t2 = theorem2_bounds(in);
        const auto t3 = theorem3_bounds(in);
        py::dict d;
        d["t1_adv"] = bound_value(t1.adversarial);
        d["t1_sto"] = bound_value(t1.self_bounding);
        d["t1_stoC"] = bound_value(t1.large_corruption);
        d["t2_adv"] = bound_value(t2.adversarial);
        d["t2_sto"] = bound_value(t2.self_bounding);
        d["t2_stoC"] = bound_value(t2.refined);
        d["t3_adv"] = bound_value(t3.adversarial);
        d["t3_sto"] = bound_value(t3.self_bounding);
        d["t3_stoC"] = bound_value(t3.refined);
        return d;
      },
      py::arg("arms"), py::arg("horizon"), py::arg("gaps") = py::none(),
      py::arg("corruption") = 0.0);

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const ExperimentConfig cfg = parse_config(config_json);
        AggregateResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg);
        }
        py::dict d;
        d["checkpoints"] = r.checkpoints;
        d["mean_regret"] = r.mean_regret;
        d["stderr"] = r.stderr_regret;
        d["final_regrets"] = r.final_regrets;
        return d;
      },
      py::arg("config_json"));

  m.def(
      "verify_lemmas",
      [](std::optional<std::size_t> trials) {
        LemmaSuiteOptions opts;
        opts.trials = trials;
        py::list out;
        for (const auto& c : run_lemma_suite(opts)) {
          out.append(py::make_tuple(c.name, c.passed, c.detail));
        }
        return out;
      },
      py::arg("trials") = py::none());

  py::class_<Learner>(m, "Learner")
      .def(py::init<std::size_t, const std::string&, std::uint64_t>(), py::arg("arms"),
           py::arg("estimator") = "reduced_variance", py::arg("seed") = 0)
      .def("step", &Learner::step, py::arg("losses"))
      .def_property_readonly("weights", &Learner::weights)
      .def_property_readonly("round", &Learner::round)
      .def_property_readonly("cumulative_estimates", &Learner::cumulative_estimates);
}
