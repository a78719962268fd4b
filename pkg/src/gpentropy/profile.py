"""Full k-profiles: corner-tree fast path for k <= 4, enumeration for k = 5, 6."""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np

from . import _kernels
from .cornertree import count_trees, fits_int64, pack_trees, select_basis
from .errors import InternalConsistencyError, ResourceGuardError, ValidationError
from .patterns import Profile, all_patterns, oracle_profile

__all__ = [
    "FALLBACK_GUARD",
    "count_3214",
    "fast_profiles",
    "fast_profile",
    "fallback_profile",
    "prefix_profiles",
    "profile",
    "window_profiles",
    "check_sample_size",
]

FALLBACK_GUARD = 2 * 10**7
METHODS = ("auto", "fast", "fallback", "oracle")


class SampleSizeWarning(UserWarning):
    """Window too small for a reliable order-k pattern distribution."""


def _ranks0(ranks) -> np.ndarray:
    r = np.asarray(ranks, dtype=np.int64).ravel()
    if r.size and not np.array_equal(np.sort(r), np.arange(1, r.size + 1)):
        raise ValidationError("ranks must be a permutation of 1..n")
    return r - 1


def _rerank(x: np.ndarray) -> np.ndarray:
    out = np.empty(x.size, dtype=np.int64)
    out[np.argsort(x, kind="stable")] = np.arange(1, x.size + 1)
    return out


def check_sample_size(w: int, k: int, factor: int = 100) -> bool:
    """Warn when ``C(w, k) < factor * k!``; returns True if the size is adequate."""
    ok = math.comb(w, k) >= factor * math.factorial(k)
    if not ok:
        warnings.warn(
            f"C({w},{k}) = {math.comb(w, k)} is below {factor}*{k}! = "
            f"{factor * math.factorial(k)}; order-{k} frequencies will be unreliable",
            SampleSizeWarning,
            stacklevel=2,
        )
    return ok


def count_3214(ranks) -> int:
    """Occurrences of 3214: ``i<j<l<m`` with ``x_l < x_j < x_i < x_m``.

    For each candidate last element the decreasing triples lying below it
    are counted with one forward and one backward Fenwick pass, O(n^2 log n).
    """
    r = _ranks0(ranks)
    if r.size < 4:
        return 0
    if math.comb(r.size, 4) > 2**62:
        raise ResourceGuardError(f"count_3214 on n={r.size} exceeds the int64 range")
    return int(_kernels.count_3214(r))


def fast_profiles(ranks, k: int) -> dict[int, tuple[int, ...]]:
    """Profiles of every order ``1..k`` (k <= 4) from corner-tree counts."""
    if k not in (2, 3, 4):
        raise ValidationError(f"fast path supports orders 2..4, got {k}")
    r = _ranks0(ranks)
    n = r.size
    profiles: dict[int, tuple[int, ...]] = {1: (n,)}
    for m in range(2, k + 1):
        basis = select_basis(m)
        tree_counts = count_trees(basis.trees, r)
        extra = [count_3214(r + 1)] if basis.extra_patterns else []
        counts = basis.solve(basis.residual(tree_counts, extra, profiles))
        if sum(counts) != math.comb(n, m) or min(counts) < 0:
            raise InternalConsistencyError(f"order-{m} profile fails its sum/sign check")
        profiles[m] = counts
    return profiles


def fast_profile(ranks, k: int) -> Profile:
    profiles = fast_profiles(ranks, k)
    n = profiles[1][0]
    lower = {m: Profile(m, n, profiles[m], "fast") for m in range(2, k)}
    return Profile(k, n, profiles[k], "fast", {"lower": lower})


@lru_cache(maxsize=None)
def _insertion_table(k: int) -> np.ndarray:
    table = np.empty(math.factorial(k), dtype=np.int64)
    for lehmer, perm in enumerate(all_patterns(k)):
        code = 0
        for d, x in enumerate(perm):
            code = code * (d + 1) + sum(1 for y in perm[:d] if y < x)
        table[code] = lehmer
    return table


def _guard(n: int, k: int, guard: int) -> None:
    total = math.comb(n, k)
    if total > guard:
        raise ResourceGuardError(
            f"C({n},{k}) = {total} tuples exceeds the enumeration guard {guard}; "
            "raise it with guard=... (CLI: --guard)"
        )


def prefix_profiles(ranks, k: int, guard: int = FALLBACK_GUARD) -> np.ndarray:
    """Profiles of every prefix: row ``j`` holds the profile of ``ranks[:j+1]``.

    Prefix ranks are standardized implicitly, since pattern counts only
    depend on relative order.
    """
    if not 2 <= k <= 8:
        raise ValidationError(f"order out of range: {k}")
    r = _ranks0(ranks)
    _guard(r.size, k, guard)
    by_last = _kernels.profile_by_last(r, k, _insertion_table(k), math.factorial(k))
    return np.cumsum(by_last, axis=0)


def fallback_profile(ranks, k: int, guard: int = FALLBACK_GUARD) -> Profile:
    """Exact profile by depth-first tuple enumeration with shared prefixes.

    Independent of the oracle's code path: patterns are built incrementally
    from insertion codes rather than standardized per tuple.
    """
    if not 2 <= k <= 8:
        raise ValidationError(f"order out of range: {k}")
    r = _ranks0(ranks)
    _guard(r.size, k, guard)
    counts = _kernels.profile_by_last(r, k, _insertion_table(k), math.factorial(k)).sum(axis=0)
    return Profile(k, r.size, tuple(int(c) for c in counts), "fallback")


def profile(ranks, k: int, method: str = "auto", guard: int = FALLBACK_GUARD) -> Profile:
    """Order-k profile by the requested method; ``auto`` picks fast for k <= 4."""
    if not isinstance(k, (int, np.integer)) or not 2 <= k <= 6:
        raise ValidationError(f"order out of range: {k!r} (allowed 2..6)")
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}")
    if method == "auto":
        method = "fast" if k <= 4 else "fallback"
    if method == "fast":
        return fast_profile(ranks, k)
    if method == "fallback":
        return fallback_profile(ranks, k, guard)
    return oracle_profile(np.asarray(ranks).tolist(), k, budget=guard)


@lru_cache(maxsize=None)
def _window_plan(k: int):
    bases = [select_basis(m) for m in range(2, k + 1)]
    trees = [t for b in bases for t in b.trees]
    return bases, pack_trees(trees)


def _solve_rows(basis, tree_counts: np.ndarray, extra: np.ndarray,
                profiles: dict[int, np.ndarray]) -> np.ndarray:
    dtype = tree_counts.dtype
    resid = tree_counts.copy()
    for i, low in enumerate(basis.lower):
        for m, comp in low.items():
            resid[:, i] -= profiles[m] @ np.asarray(comp, dtype=dtype)
    if basis.extra_patterns:
        resid = np.concatenate([resid, extra.reshape(-1, 1).astype(dtype)], axis=1)
    num = resid @ np.asarray(basis.inv_num, dtype=dtype).T
    q, rem = np.divmod(num, basis.inv_den)
    if np.any(rem != 0):
        raise InternalConsistencyError(f"order-{basis.order} window solve is not integral")
    return q


def window_profiles(ranks, width: int, k: int, stride: int = 1, method: str = "auto",
                    guard: int = FALLBACK_GUARD) -> np.ndarray:
    """Order-k profile of every sliding window, one row per window.

    Each window is re-ranked and counted from scratch.
    """
    r = _ranks0(ranks)
    n = r.size
    if width > n or width < 1:
        raise ValidationError(f"window width {width} invalid for series of length {n}")
    if method == "auto":
        method = "fast" if k <= 4 else "fallback"
    nw = (n - width) // stride + 1
    if method != "fast":
        rows = []
        for j in range(nw):
            p = profile(_rerank(r[j * stride:j * stride + width]), k, method, guard)
            rows.append(p.counts)
        return np.array(rows, dtype=object if math.comb(width, k) > 2**62 else np.int64)
    if k not in (2, 3, 4):
        raise ValidationError(f"fast path supports orders 2..4, got {k}")
    if not fits_int64(width, k):
        rows = [fast_profile(_rerank(r[j * stride:j * stride + width]), k).counts for j in range(nw)]
        return np.array(rows, dtype=object)
    bases, (par, lab, off) = _window_plan(k)
    tcounts, c3214 = _kernels.window_tree_counts(r, width, stride, par, lab, off, k == 4)
    bound = max(
        sum(abs(x) for x in row) for b in bases for row in b.inv_num
    ) * width ** k * 32
    dtype = np.int64 if bound < 2**62 else object
    tcounts = tcounts.astype(dtype)
    profiles: dict[int, np.ndarray] = {1: np.full((nw, 1), width, dtype=dtype)}
    col = 0
    for b in bases:
        nt = len(b.trees)
        profiles[b.order] = _solve_rows(b, tcounts[:, col:col + nt], c3214, profiles)
        col += nt
    out = profiles[k]
    if np.any(out.sum(axis=1) != math.comb(width, k)):
        raise InternalConsistencyError("window profile sums differ from C(w,k)")
    return out
