"""ROC curves and AUC for entropy-as-score classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ValidationError

__all__ = ["ROCResult", "roc_auc", "pairwise_auc", "mean_ci"]


@dataclass(frozen=True)
class ROCResult:
    auc: float
    thresholds: np.ndarray
    tpr: np.ndarray
    fpr: np.ndarray
    run: int | None = None


def roc_auc(scores_noisy: Sequence[float], scores_quiet: Sequence[float],
            run: int | None = None) -> ROCResult:
    """Sweep a threshold over all observed scores; ``score >= T`` means noisy.

    Positives are the noisy observations. The curve starts at (0, 0) for an
    infinite threshold and the area is the trapezoid sum, which gives tied
    (noisy, quiet) pairs half credit.
    """
    pos = np.asarray(scores_noisy, dtype=np.float64)
    neg = np.asarray(scores_quiet, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValidationError("both score sets must be non-empty")
    thresholds = np.unique(np.concatenate([pos, neg]))[::-1]
    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    tp = pos.size - np.searchsorted(pos_sorted, thresholds, side="left")
    fp = neg.size - np.searchsorted(neg_sorted, thresholds, side="left")
    tp = np.concatenate([[0], tp])
    fp = np.concatenate([[0], fp])
    # integer twice-area, divided once at the end
    twice = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = twice / (2 * pos.size * neg.size)
    return ROCResult(auc, np.concatenate([[np.inf], thresholds]),
                     tp / pos.size, fp / neg.size, run)


def pairwise_auc(scores_noisy: Sequence[float], scores_quiet: Sequence[float]) -> float:
    """Mann-Whitney statistic: P(noisy > quiet) + P(tie) / 2."""
    pos = np.asarray(scores_noisy, dtype=np.float64)[:, None]
    neg = np.asarray(scores_quiet, dtype=np.float64)[None, :]
    wins = int(np.sum(pos > neg)) * 2 + int(np.sum(pos == neg))
    return wins / (2 * pos.size * neg.size)


def mean_ci(values: Sequence[float], z: float = 1.96) -> tuple[float, float, float]:
    """Mean and normal-approximation confidence interval."""
    v = np.asarray(values, dtype=np.float64)
    m = float(v.mean())
    if v.size < 2:
        return m, m, m
    half = z * float(v.std(ddof=1)) / math.sqrt(v.size)
    return m, m - half, m + half
