"""Time series input handling: validation, ranking and sliding windows."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import ValidationError

__all__ = [
    "WindowSpec",
    "as_series",
    "rank_series",
    "sliding_windows",
    "window_count",
    "read_series_csv",
]


@dataclass(frozen=True)
class WindowSpec:
    """Width and stride of a sliding window."""

    width: int
    stride: int = 1

    def __post_init__(self):
        if self.width < 2:
            raise ValidationError(f"window width must be >= 2, got {self.width}")
        if self.stride < 1:
            raise ValidationError(f"stride must be >= 1, got {self.stride}")


def as_series(values) -> np.ndarray:
    """Return `values` as a 1-d float64 array, rejecting non-finite entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"time series must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError("time series is empty")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise ValidationError(f"non-finite value {arr[i]!r} at index {i}")
    return arr


def rank_series(values) -> np.ndarray:
    """Ranks 1..n of `values`; equal values are ordered by time of appearance.

    >>> rank_series([1.0, 1.0, 0.5]).tolist()
    [2, 3, 1]
    """
    arr = as_series(values)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=np.int64)
    ranks[order] = np.arange(1, arr.size + 1)
    return ranks


def window_count(n: int, spec: WindowSpec) -> int:
    if spec.width > n:
        raise ValidationError(f"window width {spec.width} exceeds series length {n}")
    return (n - spec.width) // spec.stride + 1


def sliding_windows(values, spec: WindowSpec) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(t, window)`` pairs, `t` being the 1-based end index of the window.

    Windows are read-only views into the input array.
    """
    arr = as_series(values)
    count = window_count(arr.size, spec)
    view = arr.view()
    view.flags.writeable = False
    for j in range(count):
        end = spec.width + j * spec.stride
        yield end, view[end - spec.width:end]


def _parse_float(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ValidationError(f"line {lineno}: cannot parse {token!r} as a number") from None


def read_series_csv(source: str | Path | io.TextIOBase) -> np.ndarray:
    """Read a series from CSV: one value per line, or ``t,value`` columns.

    A non-numeric first row is treated as a header. Python's float parser is
    locale independent, so only '.' is accepted as decimal separator.
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source, newline="") as fh:
                rows = list(csv.reader(fh))
        except OSError as exc:
            raise ValidationError(f"cannot read {source}: {exc.strerror}") from None
    else:
        rows = list(csv.reader(source))
    rows = [(i + 1, [c.strip() for c in r]) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not rows:
        raise ValidationError("input contains no data")
    first_no, first = rows[0]
    try:
        [float(c) for c in first]
    except ValueError:
        rows = rows[1:]
    values: list[float] = []
    for lineno, row in rows:
        if len(row) == 1:
            values.append(_parse_float(row[0], lineno))
        elif len(row) == 2:
            values.append(_parse_float(row[1], lineno))
        else:
            raise ValidationError(f"line {lineno}: expected 1 or 2 columns, got {len(row)}")
    arr = np.array(values, dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValidationError(f"non-finite value at data row {int(bad[0])}")
    return as_series(arr)
