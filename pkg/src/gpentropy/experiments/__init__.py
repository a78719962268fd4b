"""Seeded synthetic-signal experiments."""

from .harness import (
    ConvergenceConfig,
    ExperimentReport,
    NoiseDetectionConfig,
    RampConfig,
    config_from_mapping,
    run_convergence,
    run_experiment,
    run_noise_detection,
    run_ramp,
)
from .rng import Rng, derive_seed
from .signals import SignalSpec, gen_signal

__all__ = [
    "ConvergenceConfig",
    "ExperimentReport",
    "NoiseDetectionConfig",
    "RampConfig",
    "config_from_mapping",
    "run_convergence",
    "run_experiment",
    "run_noise_detection",
    "run_ramp",
    "Rng",
    "derive_seed",
    "SignalSpec",
    "gen_signal",
]
