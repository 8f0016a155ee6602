"""Tsallis-INF bandits, regret bounds and the experiment harness."""

from ._core import (
    Learner,
    bounds,
    lambert_w_minus1,
    learning_rate,
    quadratic_max,
    reduced_variance_estimate,
    run_experiment,
    tsallis_weights,
    verify_lemmas,
)

__all__ = [
    "Learner",
    "bounds",
    "lambert_w_minus1",
    "learning_rate",
    "quadratic_max",
    "reduced_variance_estimate",
    "run_experiment",
    "tsallis_weights",
    "verify_lemmas",
]
