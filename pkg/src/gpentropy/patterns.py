"""Pattern identifiers, the brute-force profile oracle and pattern symmetries.

A pattern of order ``k`` is a permutation of ``1..k`` in one-line notation.
Its index is the Lehmer-code rank, which coincides with the position of the
permutation in lexicographic order (``123 -> 0``, ``321 -> 5``).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceGuardError, ValidationError

__all__ = [
    "MAX_ORDER",
    "ORACLE_BUDGET",
    "Profile",
    "standardize",
    "encode",
    "decode",
    "pattern_label",
    "all_patterns",
    "reverse",
    "complement",
    "reverse_map",
    "complement_map",
    "oracle_profile",
]

MAX_ORDER = 8
ORACLE_BUDGET = 10**8


def _check_order(k: int, lo: int = 1, hi: int = MAX_ORDER) -> None:
    if not isinstance(k, (int, np.integer)) or not lo <= k <= hi:
        raise ValidationError(f"order out of range: {k!r} (allowed {lo}..{hi})")


def standardize(entries: Sequence) -> tuple[int, ...]:
    """Reduce pairwise distinct entries to a permutation of ``1..k``.

    >>> standardize((4, 3, 5))
    (2, 1, 3)
    """
    entries = list(entries)
    if len(set(entries)) != len(entries):
        raise ValidationError(f"tuple has duplicate entries: {tuple(entries)}")
    order = sorted(range(len(entries)), key=entries.__getitem__)
    perm = [0] * len(entries)
    for r, j in enumerate(order, start=1):
        perm[j] = r
    return tuple(perm)


def encode(entries: Sequence) -> int:
    """Lehmer-code rank of the pattern formed by `entries`."""
    perm = standardize(entries)
    k = len(perm)
    _check_order(k)
    idx = 0
    for j in range(k):
        smaller_after = sum(1 for i in range(j + 1, k) if perm[i] < perm[j])
        idx += smaller_after * math.factorial(k - 1 - j)
    return idx


def decode(index: int, k: int) -> tuple[int, ...]:
    """Inverse of :func:`encode` for patterns of order `k`."""
    _check_order(k)
    if not 0 <= index < math.factorial(k):
        raise ValidationError(f"pattern index {index} out of range for order {k}")
    remaining = list(range(1, k + 1))
    out = []
    for j in range(k):
        f = math.factorial(k - 1 - j)
        d, index = divmod(index, f)
        out.append(remaining.pop(d))
    return tuple(out)


def pattern_label(perm: Sequence[int]) -> str:
    """One-line notation string, e.g. ``(3, 2, 1) -> '321'``."""
    return "".join(str(p) for p in perm)


def parse_pattern(text: str) -> tuple[int, ...]:
    text = text.strip().strip("[]").replace(",", " ")
    parts = text.split() if " " in text else list(text)
    perm = tuple(int(p) for p in parts)
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValidationError(f"not a permutation: {text!r}")
    return perm


@lru_cache(maxsize=None)
def all_patterns(k: int) -> tuple[tuple[int, ...], ...]:
    """All permutations of order `k`, indexed by Lehmer rank."""
    _check_order(k)
    return tuple(itertools.permutations(range(1, k + 1)))


def reverse(index: int, k: int) -> int:
    return encode(decode(index, k)[::-1])


def complement(index: int, k: int) -> int:
    return encode(tuple(k + 1 - p for p in decode(index, k)))


@lru_cache(maxsize=None)
def reverse_map(k: int) -> tuple[int, ...]:
    return tuple(reverse(i, k) for i in range(math.factorial(k)))


@lru_cache(maxsize=None)
def complement_map(k: int) -> tuple[int, ...]:
    return tuple(complement(i, k) for i in range(math.factorial(k)))


@dataclass(frozen=True)
class Profile:
    """Exact counts of every order-`k` pattern over all ``C(n, k)`` index tuples.

    Counts are arbitrary-precision Python integers indexed by Lehmer rank.
    `method` records which counting path produced the profile.
    """

    order: int
    n: int
    counts: tuple[int, ...]
    method: str = "oracle"
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(self.counts) != math.factorial(self.order):
            raise ValidationError(
                f"profile of order {self.order} needs {math.factorial(self.order)} counts, "
                f"got {len(self.counts)}"
            )

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __getitem__(self, pattern) -> int:
        if isinstance(pattern, (int, np.integer)):
            return self.counts[pattern]
        if isinstance(pattern, str):
            pattern = parse_pattern(pattern)
        return self.counts[encode(pattern)]

    def as_dict(self) -> dict[str, int]:
        return {pattern_label(p): c for p, c in zip(all_patterns(self.order), self.counts)}

    def mapped(self, index_map: Sequence[int]) -> "Profile":
        """Profile with the count of pattern ``i`` moved to ``index_map[i]``."""
        out = [0] * len(self.counts)
        for i, c in enumerate(self.counts):
            out[index_map[i]] += c
        return Profile(self.order, self.n, tuple(out), self.method)

    def to_json(self) -> str:
        payload = {
            "order": self.order,
            "n": self.n,
            "counts": {k: str(v) for k, v in self.as_dict().items()},
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "Profile":
        payload = json.loads(text)
        k = int(payload["order"])
        counts = [0] * math.factorial(k)
        for label, value in payload["counts"].items():
            counts[encode(parse_pattern(label))] = int(value)
        return cls(k, int(payload["n"]), tuple(counts), payload.get("method", "json"))


def _lehmer_rows(vals: np.ndarray) -> np.ndarray:
    """Lehmer rank of each row of a 2-d array of distinct values."""
    m, k = vals.shape
    idx = np.zeros(m, dtype=np.int64)
    for j in range(k - 1):
        smaller_after = (vals[:, j + 1:] < vals[:, j:j + 1]).sum(axis=1)
        idx += smaller_after * math.factorial(k - 1 - j)
    return idx


def oracle_profile(ranks: Iterable[int], k: int, budget: int = ORACLE_BUDGET,
                   chunk: int = 1 << 16) -> Profile:
    """Count patterns by enumerating every increasing index tuple.

    This is deliberately the slowest and simplest path; every other counter
    is checked against it.

    Parameters
    ----------
    ranks : sequence of int
        Rank sequence (distinct integers).
    k : int
        Pattern order, ``2 <= k <= 8``.
    budget : int
        Maximum number of tuples to enumerate.
    """
    _check_order(k, 2)
    r = np.asarray(list(ranks), dtype=np.int64)
    n = r.size
    n_tuples = math.comb(n, k)
    if n_tuples > budget:
        raise ResourceGuardError(
            f"oracle refuses: C({n},{k}) = {n_tuples} tuples exceeds budget {budget}"
        )
    counts = np.zeros(math.factorial(k), dtype=np.int64)
    combos = itertools.combinations(range(n), k)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(combos, chunk)), dtype=np.int64
        )
        if flat.size == 0:
            break
        counts += np.bincount(_lehmer_rows(r[flat.reshape(-1, k)]), minlength=counts.size)
    return Profile(k, n, tuple(int(c) for c in counts), "oracle")
