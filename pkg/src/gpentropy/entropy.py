"""Shannon entropies of ordinal-pattern distributions.

All logarithms are natural; raw values are in nats. Normalized values divide
by ``log(k!)`` and therefore do not depend on the logarithm base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .cornertree import count_trees, independent_trees
from .errors import InsufficientDataError, ResourceGuardError, ValidationError
from .profile import FALLBACK_GUARD, profile
from .series import rank_series

__all__ = [
    "EntropyValue",
    "shannon",
    "gpe",
    "pe",
    "pe_counts",
    "pe_avg",
    "ctpe",
    "delayed_pattern_codes",
]

_EXACT_FLOAT = 2**53


@dataclass(frozen=True)
class EntropyValue:
    kind: str
    order: int
    raw: float
    normalized: float
    sample_size: int
    delay: int | tuple[int, ...] | None = None
    method: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)
    report_normalized: bool = True

    @property
    def value(self) -> float:
        return self.normalized if self.report_normalized else self.raw

    def to_record(self) -> dict:
        delay = list(self.delay) if isinstance(self.delay, tuple) else self.delay
        return {
            "kind": self.kind,
            "order": self.order,
            "delay": delay,
            "raw_nats": self.raw,
            "normalized": self.normalized,
            "sample_size": self.sample_size,
            "method": self.method,
        }


def shannon(weights: Iterable) -> float:
    """Entropy in nats of the distribution proportional to `weights`.

    Zero weights contribute nothing (``0 log 0 = 0``).

    >>> round(shannon([2, 0, 9, 4, 7, 13]), 5)
    1.45041
    """
    w = list(weights)
    if any(x < 0 for x in w):
        raise ValidationError("weights must be non-negative")
    if not w or sum(w) == 0:
        raise ValidationError("entropy undefined: all weights are zero")
    if all(isinstance(x, (int, np.integer)) for x in w) and sum(w) >= _EXACT_FLOAT:
        total = sum(int(x) for x in w)
        return -sum((int(x) / total) * math.log(int(x) / total) for x in w if x)
    arr = np.asarray(w, dtype=np.float64).reshape(1, -1)
    return float(_kernels.entropy_rows(arr)[0])


def _as_ranks(series) -> np.ndarray:
    return rank_series(series)


def gpe(series, k: int, normalized: bool = True, method: str = "auto",
        guard: int = FALLBACK_GUARD) -> EntropyValue:
    """Global permutation entropy: entropy of the full order-k profile."""
    r = _as_ranks(series)
    n = r.size
    if n < k:
        raise InsufficientDataError(f"GPE of order {k} needs at least {k} points, got {n}")
    prof = profile(r, k, method, guard)
    raw = shannon(prof.counts)
    norm = raw / math.log(math.factorial(k))
    return EntropyValue("GPE", k, raw, norm, math.comb(n, k), None, prof.method,
                        report_normalized=normalized)


def delayed_pattern_codes(ranks: np.ndarray, k: int, tau: int) -> np.ndarray:
    """Lehmer rank of ``(x_i, x_{i+tau}, ..., x_{i+tau(k-1)})`` for every valid i."""
    m = ranks.size - tau * (k - 1)
    if m < 1:
        return np.zeros(0, dtype=np.int64)
    cols = np.stack([ranks[j * tau:j * tau + m] for j in range(k)], axis=1)
    idx = np.zeros(m, dtype=np.int64)
    for j in range(k - 1):
        idx += (cols[:, j + 1:] < cols[:, j:j + 1]).sum(axis=1) * math.factorial(k - 1 - j)
    return idx


def _check_pe(n: int, k: int, tau: int) -> int:
    if not isinstance(tau, (int, np.integer)) or tau < 1:
        raise ValidationError(f"delay must be a positive integer, got {tau!r}")
    if k < 2:
        raise ValidationError(f"order out of range: {k}")
    m = n - tau * (k - 1)
    if m < 1:
        raise InsufficientDataError(
            f"PE with order {k} and delay {tau} needs at least {tau * (k - 1) + 1} points, got {n}"
        )
    return m


def pe_counts(series, k: int, tau: int = 1) -> np.ndarray:
    r = _as_ranks(series)
    _check_pe(r.size, k, tau)
    return np.bincount(delayed_pattern_codes(r, k, tau), minlength=math.factorial(k))


def pe(series, k: int, tau: int = 1, normalized: bool = True) -> EntropyValue:
    """Classical permutation entropy over delay-spaced consecutive tuples."""
    r = _as_ranks(series)
    m = _check_pe(r.size, k, tau)
    counts = np.bincount(delayed_pattern_codes(r, k, tau), minlength=math.factorial(k))
    raw = shannon(counts)
    return EntropyValue("PE", k, raw, raw / math.log(math.factorial(k)), m, int(tau), "consecutive",
                        report_normalized=normalized)


def pe_avg(series, k: int, delays: Sequence[int]) -> EntropyValue:
    """Mean of normalized PE over a set of delays.

    `sample_size` is that of the largest delay, the smallest in the set.
    """
    delays = tuple(sorted(set(int(d) for d in delays)))
    if not delays:
        raise ValidationError("delay set is empty")
    r = _as_ranks(series)
    for d in delays:
        _check_pe(r.size, k, d)
    vals = [pe(r, k, d) for d in delays]
    raw = sum(v.raw for v in vals) / len(vals)
    norm = sum(v.normalized for v in vals) / len(vals)
    return EntropyValue("PEavg", k, raw, norm, min(v.sample_size for v in vals), delays, "consecutive",
                        {"per_delay": {d: v.normalized for d, v in zip(delays, vals)}})


def ctpe(series, k: int, normalized: bool = True, allow_expensive: bool = False) -> EntropyValue:
    """Corner-tree entropy over a maximal independent set of k-vertex trees.

    The normalized value divides by ``log(m)``, m being the size of the
    tree set; that choice is recorded in ``meta["normalization"]``.
    Order 6 requires scanning thousands of trees once and is only done
    with ``allow_expensive=True``.
    """
    if not 2 <= k <= 6:
        raise ValidationError(f"order out of range: {k!r} (allowed 2..6)")
    if k == 6 and not allow_expensive:
        raise ResourceGuardError("CTPE of order 6 needs allow_expensive=True (CLI: --allow-expensive)")
    r = _as_ranks(series)
    trees = independent_trees(k)
    counts = count_trees(trees, r)
    if sum(counts) == 0:
        raise InsufficientDataError("corner-tree counts are all zero; entropy undefined")
    raw = shannon(counts)
    m = len(trees)
    return EntropyValue("CTPE", k, raw, raw / math.log(m), sum(counts), None, "cornertree",
                        {"normalization": f"log({m})", "trees": [t.encode() for t in trees],
                         "counts": counts},
                        report_normalized=normalized)
