"""Experiment harness: configs, streams, accumulators, campaigns, CLI."""

from .accumulate import Accumulator
from .config import EXPERIMENT_DEFAULTS, ExperimentConfig, load_config
from .experiments import Result, run_experiment
from .rng import replica_stream

__all__ = [
    "Accumulator",
    "EXPERIMENT_DEFAULTS",
    "ExperimentConfig",
    "load_config",
    "Result",
    "run_experiment",
    "replica_stream",
]
