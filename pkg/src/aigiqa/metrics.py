"""Rank and linear correlation metrics for benchmarking predicted scores.

srcc uses average ranks, which coincides with the classical 1 - 6*sum(d^2) /
(N*(N^2-1)) form whenever there are no ties. Undefined correlations (zero
variance in either vector) raise instead of returning 0, so degenerate
predictors cannot silently pollute a benchmark table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class UndefinedCorrelationError(ValueError):
    """Correlation is undefined: one of the vectors has zero (rank) variance."""


@dataclass(frozen=True)
class ScorePairSet:
    """Aligned true/predicted score vectors."""

    truth: np.ndarray
    predicted: np.ndarray

    def __post_init__(self) -> None:
        truth = np.asarray(self.truth, dtype=float)
        predicted = np.asarray(self.predicted, dtype=float)
        object.__setattr__(self, "truth", truth)
        object.__setattr__(self, "predicted", predicted)
        if truth.ndim != 1 or predicted.ndim != 1:
            raise ValueError("score vectors must be one-dimensional")
        if truth.shape != predicted.shape:
            raise ValueError(
                f"length mismatch: {truth.shape[0]} truth vs {predicted.shape[0]} predicted"
            )
        if truth.shape[0] < 2:
            raise ValueError(f"need at least 2 score pairs, got {truth.shape[0]}")
        if np.isnan(truth).any() or np.isnan(predicted).any():
            raise ValueError("score vectors must not contain NaN")

    def __len__(self) -> int:
        return int(self.truth.shape[0])


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks starting at 1; tied values share the mean of their rank positions."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray, what: str) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc * xc).sum() * (yc * yc).sum())
    if denom == 0.0:
        raise UndefinedCorrelationError(f"{what} undefined: zero variance input")
    return float(np.clip((xc * yc).sum() / denom, -1.0, 1.0))


def srcc(truth, predicted=None) -> float:
    """Spearman rank correlation between true and predicted scores."""
    pairs = truth if isinstance(truth, ScorePairSet) else ScorePairSet(truth, predicted)
    r_t = average_ranks(pairs.truth)
    r_p = average_ranks(pairs.predicted)
    return _pearson(r_t, r_p, "srcc")


def plcc(truth, predicted=None) -> float:
    """Pearson linear correlation between true and predicted scores."""
    pairs = truth if isinstance(truth, ScorePairSet) else ScorePairSet(truth, predicted)
    return _pearson(pairs.truth, pairs.predicted, "plcc")
