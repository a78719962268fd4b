"""Synthetic signal families used by the experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .rng import Rng

__all__ = ["FAMILIES", "SignalSpec", "gen_signal", "burst_onset"]

FAMILIES = ("iid", "noisy_line", "noisy_sine", "noise_burst", "ramp_noise")


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of one signal family.

    `noise_var` is the variance of the additive noise of ``noisy_line`` and
    ``noisy_sine``; pass `noise_sd` instead to give a standard deviation.
    """

    family: str
    length: int | None = None
    period: int = 10
    eps: float = 0.0
    sigma2: float = 1.0
    slope: float = 0.05
    noise_var: float | None = 0.025
    noise_sd: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown signal family {self.family!r}")
        if self.period < 2:
            raise ValidationError(f"period must be >= 2, got {self.period}")
        if self.eps < 0:
            raise ValidationError(f"noise scale must be >= 0, got {self.eps}")
        if self.sigma2 <= 0:
            raise ValidationError(f"noise variance must be > 0, got {self.sigma2}")
        if self.length is not None and self.length < 1:
            raise ValidationError(f"length must be >= 1, got {self.length}")
        if self.noise_sd is not None and self.noise_sd < 0:
            raise ValidationError("noise_sd must be >= 0")
        if self.noise_var is not None and self.noise_var < 0:
            raise ValidationError("noise_var must be >= 0")

    def additive_sd(self) -> float:
        if self.noise_sd is not None:
            return self.noise_sd
        return math.sqrt(self.noise_var or 0.0)

    @property
    def n(self) -> int:
        if self.family == "noise_burst":
            return 9 * self.period // 2
        if self.family == "ramp_noise":
            return 10 * self.period
        if self.length is not None:
            return self.length
        return 50 if self.family == "iid" else 40


def burst_onset(period: int) -> int:
    """Last time index (1-based) of the less noisy segment."""
    return 3 * period


def gen_signal(spec: SignalSpec, rng: Rng) -> np.ndarray:
    n = spec.n
    t = np.arange(1, n + 1, dtype=np.float64)
    if spec.family == "iid":
        return rng.normal(n)
    if spec.family == "noisy_line":
        return spec.slope * t + rng.normal(n, spec.additive_sd())
    if spec.family == "noisy_sine":
        return np.sin(np.linspace(0.0, np.pi, n)) + rng.normal(n, spec.additive_sd())
    base = np.sin(2.0 * np.pi * t / spec.period)
    if spec.family == "noise_burst":
        scale = np.where(t <= burst_onset(spec.period), spec.eps, 1.0)
        return base + scale * rng.normal(n)
    # ramp_noise
    return base + (t / (10.0 * spec.period)) * rng.normal(n, math.sqrt(spec.sigma2))
