"""Correlation between predicted scores and subjective opinion scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class BenchmarkRow:
    content_id: str
    predicted: float
    mos: float

    def __post_init__(self):
        if not (np.isfinite(self.predicted) and np.isfinite(self.mos)):
            raise ValueError(f"{self.content_id}: scores must be finite")


def _columns(rows):
    rows = list(rows)
    if len(rows) < 2:
        raise ValueError("need at least 2 rows")
    x = np.array([r.predicted for r in rows], dtype=np.float64)
    y = np.array([r.mos for r in rows], dtype=np.float64)
    return x, y


def _pearson(x, y):
    x = x - x.mean()
    y = y - y.mean()
    sxx = np.dot(x, x)
    syy = np.dot(y, y)
    if sxx == 0 or syy == 0:
        raise ValueError("zero variance")
    return float(np.clip(np.dot(x, y) / np.sqrt(sxx * syy), -1.0, 1.0))


def plcc(rows) -> float:
    """Pearson linear correlation coefficient."""
    return _pearson(*_columns(rows))


def srocc(rows) -> float:
    """Spearman rank-order correlation; ties get their average rank."""
    x, y = _columns(rows)
    return _pearson(rankdata(x), rankdata(y))
