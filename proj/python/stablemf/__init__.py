"""Python bindings for the stablemf C++ library."""

import json

from ._core import (
    ConfigError,
    a_eval,
    check_assumption_a,
    coupled_a_distance,
    coupled_run,
    delta_rule,
    jump_measure_tail,
    rate_exponent_theory,
    sample_stable,
    stable_fractional_moment,
    stable_laplace,
    wasserstein_exact,
)
from . import _core


def _as_json(config):
    return config if isinstance(config, str) else json.dumps(config)


def rate_experiment(config):
    """Runs the coupling-rate experiment; config is a dict or a JSON string."""
    return json.loads(_core.rate_experiment_json(_as_json(config)))


def picard_experiment(config):
    return json.loads(_core.picard_experiment_json(_as_json(config)))


def distribution_suite(samples=100000, seed=1):
    return json.loads(_core.distribution_suite_json(samples, seed))


def simulate_coupled(config, particles, replication=0):
    """Finite system, coupled subordinator and paired mean-field system."""
    return coupled_run(_as_json(config), particles, replication)


__all__ = [
    "ConfigError",
    "a_eval",
    "check_assumption_a",
    "coupled_a_distance",
    "delta_rule",
    "distribution_suite",
    "jump_measure_tail",
    "picard_experiment",
    "rate_experiment",
    "rate_exponent_theory",
    "sample_stable",
    "simulate_coupled",
    "stable_fractional_moment",
    "stable_laplace",
    "wasserstein_exact",
]
