"""Sliding-window entropy series and window-size selection."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .cornertree import fits_int64, independent_trees, pack_trees
from .entropy import delayed_pattern_codes, shannon
from .errors import InsufficientDataError, ValidationError
from .profile import FALLBACK_GUARD, window_profiles
from .series import WindowSpec, as_series, rank_series, window_count

__all__ = [
    "KINDS",
    "EntropySeries",
    "SweepCurve",
    "HalfPeriodEstimate",
    "windowed_entropy",
    "feasible_delays",
    "default_sweep_range",
    "window_size_sweep",
    "estimate_half_period",
]

KINDS = ("gpe", "pe", "peavg", "ctpe")


@dataclass(frozen=True)
class EntropySeries:
    """Normalized entropies ``Y_t`` of the windows ending at ``t`` (1-based)."""

    t: np.ndarray
    values: np.ndarray
    kind: str
    order: int
    width: int
    stride: int = 1
    delay: int | tuple[int, ...] | None = None

    def __len__(self):
        return self.values.size

    def to_csv(self) -> str:
        lines = ["t,value"]
        lines.extend(f"{int(t)},{float(v)!r}" for t, v in zip(self.t, self.values))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepCurve:
    windows: np.ndarray
    mean_entropy: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.windows.size != self.mean_entropy.size:
            raise ValidationError("window and entropy vectors differ in length")
        if self.windows.size > 1 and np.any(np.diff(self.windows) <= 0):
            raise ValidationError("window sizes must be strictly increasing")

    def to_csv(self) -> str:
        lines = ["window,mean_entropy"]
        lines.extend(f"{int(w)},{float(v)!r}" for w, v in zip(self.windows, self.mean_entropy))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class HalfPeriodEstimate:
    window: int
    interior: bool
    recommended: tuple[int, int]


def feasible_delays(w: int, k: int) -> list[int]:
    """Delays that leave at least one k-tuple inside a window of width `w`."""
    if k < 2:
        raise ValidationError(f"order out of range: {k}")
    if w < k:
        raise InsufficientDataError(f"no feasible delay: window {w} is shorter than order {k}")
    return list(range(1, (w - 1) // (k - 1) + 1))


def _row_entropies(counts: np.ndarray) -> np.ndarray:
    if counts.dtype == object:
        return np.array([shannon(row) for row in counts], dtype=np.float64)
    return _kernels.entropy_rows(counts.astype(np.float64))


def _pe_series(r: np.ndarray, k: int, w: int, tau: int, stride: int) -> np.ndarray:
    m = w - tau * (k - 1)
    if m < 1:
        raise InsufficientDataError(
            f"PE(order {k}, delay {tau}) needs windows of at least {tau * (k - 1) + 1} points; "
            f"window ending at t={w} has {w}"
        )
    codes = delayed_pattern_codes(r, k, tau)
    nf = math.factorial(k)
    starts = np.arange(0, r.size - w + 1, stride)
    if codes.size * nf <= 5_000_000:
        onehot = np.zeros((codes.size + 1, nf), dtype=np.int64)
        onehot[np.arange(1, codes.size + 1), codes] = 1
        cum = np.cumsum(onehot, axis=0)
        counts = cum[starts + m] - cum[starts]
    else:
        counts = np.stack([np.bincount(codes[s:s + m], minlength=nf) for s in starts])
    return _kernels.entropy_rows(counts.astype(np.float64)) / math.log(nf)


def _ctpe_series(r: np.ndarray, k: int, w: int, stride: int) -> np.ndarray:
    trees = independent_trees(k)
    if not fits_int64(w, k):
        raise ValidationError(f"windowed CTPE limited to windows with w**{k} < 2**63")
    par, lab, off = pack_trees(trees)
    counts, _ = _kernels.window_tree_counts(r - 1, w, stride, par, lab, off, False)
    h = _row_entropies(counts)
    if np.any(np.isnan(h)):
        bad = int(np.flatnonzero(np.isnan(h))[0]) * stride + w
        raise InsufficientDataError(f"corner-tree counts all zero in window ending at t={bad}")
    return h / math.log(len(trees))


def windowed_entropy(series, kind: str, k: int, w: int, delay: int = 1,
                     delays: Sequence[int] | None = None, stride: int = 1,
                     method: str = "auto", guard: int = FALLBACK_GUARD) -> EntropySeries:
    """Entropy of every window ``[t-w+1, t]``, for ``t = w, w+stride, ...``.

    Parameters
    ----------
    kind : {"gpe", "pe", "peavg", "ctpe"}
    k : int
        Pattern order (tree size for ``ctpe``).
    w : int
        Window width.
    delay : int
        Delay for ``pe``.
    delays : sequence of int, optional
        Delay set for ``peavg``; defaults to every feasible delay.
    """
    kind = kind.lower()
    if kind not in KINDS:
        raise ValidationError(f"unknown entropy kind {kind!r}")
    x = as_series(series)
    spec = WindowSpec(w, stride)
    nw = window_count(x.size, spec)
    if w < k:
        raise InsufficientDataError(f"window {w} shorter than order {k} at t={w}")
    r = rank_series(x)
    t = w + stride * np.arange(nw)
    used_delay: int | tuple[int, ...] | None = None
    if kind == "gpe":
        counts = window_profiles(r, w, k, stride, method, guard)
        values = _row_entropies(counts) / math.log(math.factorial(k))
    elif kind == "pe":
        values = _pe_series(r, k, w, delay, stride)
        used_delay = int(delay)
    elif kind == "peavg":
        ds = tuple(sorted(set(delays))) if delays else tuple(feasible_delays(w, k))
        values = np.mean([_pe_series(r, k, w, d, stride) for d in ds], axis=0)
        used_delay = ds
    else:
        values = _ctpe_series(r, k, w, stride)
    return EntropySeries(t, values, kind, k, w, stride, used_delay)


def default_sweep_range(n: int, k: int, factor: int = 100) -> range:
    """Widths from the first with ``C(w,k) >= factor*k!`` up to ``n // 2``."""
    need = factor * math.factorial(k)
    w = k
    while math.comb(w, k) < need:
        w += 1
    return range(w, n // 2 + 1)


def window_size_sweep(realizations: Sequence, kind: str, k: int, w_range: Sequence[int],
                      threads: int = 1, **params) -> SweepCurve:
    """Mean windowed entropy per width, over every window of every realization.

    All (realization, window) pairs carry equal weight.
    """
    widths = sorted(set(int(w) for w in w_range))
    if not widths:
        raise ValidationError("empty window range")
    series = [as_series(s) for s in realizations]
    if not series:
        raise ValidationError("no realizations given")

    def one(w: int) -> float:
        total, count = 0.0, 0
        for i, s in enumerate(series):
            try:
                es = windowed_entropy(s, kind, k, w, **params)
            except (InsufficientDataError, ValidationError) as exc:
                raise type(exc)(f"realization {i}, window {w}: {exc}") from exc
            total += float(es.values.sum())
            count += es.values.size
        return total / count

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            means = list(pool.map(one, widths))
    else:
        means = [one(w) for w in widths]
    return SweepCurve(np.asarray(widths, dtype=np.int64), np.asarray(means),
                      {"kind": kind, "order": k, "realizations": len(series)})


def estimate_half_period(curve: SweepCurve) -> HalfPeriodEstimate:
    """Width minimizing the sweep curve; the smallest width wins ties.

    A minimum at either end of the range is reported with ``interior=False``.
    """
    if curve.windows.size == 0:
        raise ValidationError("empty sweep curve")
    i = int(np.argmin(curve.mean_entropy))
    w = int(curve.windows[i])
    interior = 0 < i < curve.windows.size - 1
    return HalfPeriodEstimate(w, interior, (w, 2 * w))
