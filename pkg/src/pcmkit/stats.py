"""Correlation coefficients, empirical quantiles and index-value class binning."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "DegenerateDataError",
    "PartitionError",
    "ClassPartition",
    "ClassSummary",
    "pearson",
    "spearman",
    "quantile",
    "average_ranks",
    "make_partition",
    "assign_classes",
    "summarize_classes",
]


class DegenerateDataError(ValueError):
    """Correlation is undefined because one of the sequences has zero variance."""


class PartitionError(ValueError):
    """The sample cannot be split into the requested quantile classes."""


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation coefficient."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1 or xa.size < 2:
        raise ValueError("need two equally long sequences of length >= 2")
    xd = xa - xa.mean()
    yd = ya - ya.mean()
    denom = np.sqrt((xd @ xd) * (yd @ yd))
    if denom == 0:
        raise DegenerateDataError("zero variance in pearson input")
    return float(np.clip((xd @ yd) / denom, -1.0, 1.0))


def average_ranks(x: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties receiving the average of their rank range."""
    xa = np.asarray(x, dtype=float)
    order = np.argsort(xa, kind="stable")
    sorted_x = xa[order]
    ranks = np.empty(xa.size)
    i = 0
    while i < xa.size:
        j = i
        while j + 1 < xa.size and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation: Pearson coefficient of average-rank transforms."""
    return pearson(average_ranks(x), average_ranks(y))


def spearman_or_nan(x: Sequence[float], y: Sequence[float]) -> float:
    """spearman, but NaN instead of an error on degenerate input."""
    try:
        return spearman(x, y)
    except DegenerateDataError:
        return float("nan")


def quantile(sample: Sequence[float], p: float) -> float:
    """Empirical quantile by linear interpolation at h = (N-1)p + 1."""
    arr = np.asarray(sample, dtype=float)
    if arr.size == 0:
        raise ValueError("empty sample")
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    return float(np.quantile(arr, p))


@dataclass(frozen=True)
class ClassPartition:
    """Quantile-anchored split of [0, inf) into n_classes half-open intervals.

    boundaries[0] is 0, boundaries[-1] is +inf; the first interior boundary is
    the 1/n_classes sample quantile, the last finite one the 1 - 1/n_classes
    quantile, and everything between is equally spaced.
    """

    boundaries: tuple
    n_classes: int

    def __post_init__(self):
        b = tuple(float(v) for v in self.boundaries)
        if len(b) != self.n_classes + 1:
            raise ValueError("need n_classes + 1 boundaries")
        if any(hi <= lo for lo, hi in zip(b, b[1:])):
            raise ValueError("boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries", b)

    def class_of(self, x: float) -> int:
        """1-based index of the interval [b_i, b_{i+1}) containing x."""
        return int(np.searchsorted(self.boundaries[1:-1], x, side="right")) + 1


def make_partition(index_values: Sequence[float], n_classes: int) -> ClassPartition:
    """Split observed index values into quantile-anchored classes."""
    if n_classes < 3:
        raise ValueError("need n_classes >= 3")
    arr = np.asarray(index_values, dtype=float)
    if arr.size < n_classes:
        raise ValueError("need at least n_classes samples")
    lo = quantile(arr, 1.0 / n_classes)
    hi = quantile(arr, 1.0 - 1.0 / n_classes)
    if hi <= lo:
        raise PartitionError("degenerate sample: boundary quantiles coincide")
    interior = np.linspace(lo, hi, n_classes - 1)
    return ClassPartition((0.0, *interior, np.inf), n_classes)


def assign_classes(partition: ClassPartition, values: Sequence[float]) -> np.ndarray:
    """Vectorized ClassPartition.class_of; returns 1-based class indices."""
    arr = np.asarray(values, dtype=float)
    return np.searchsorted(partition.boundaries[1:-1], arr, side="right") + 1


@dataclass(frozen=True)
class ClassSummary:
    """Per-class error-distribution characteristics; statistics None when empty."""

    class_index: int
    lower: float
    upper: float
    count: int
    mean_index_value: Optional[float]
    q10: Optional[float]
    median: Optional[float]
    q90: Optional[float]
    mean_error: Optional[float]


def summarize_classes(records, index: str, error: str, n_classes: int = 15) -> list:
    """Bin records by one index and summarize one error type per class.

    `records` is any sequence of objects exposing the named index and error
    attributes (SimRecord does).
    """
    records = list(records)
    if not records:
        raise ValueError("no records to summarize")
    idx_vals = np.array([getattr(r, index) for r in records])
    err_vals = np.array([getattr(r, error) for r in records])
    part = make_partition(idx_vals, n_classes)
    classes = assign_classes(part, idx_vals)
    out = []
    for c in range(1, n_classes + 1):
        mask = classes == c
        count = int(mask.sum())
        lo, hi = part.boundaries[c - 1], part.boundaries[c]
        if count == 0:
            out.append(ClassSummary(c, lo, hi, 0, None, None, None, None, None))
            continue
        errs = err_vals[mask]
        out.append(
            ClassSummary(
                class_index=c,
                lower=lo,
                upper=hi,
                count=count,
                mean_index_value=float(idx_vals[mask].mean()),
                q10=quantile(errs, 0.1),
                median=quantile(errs, 0.5),
                q90=quantile(errs, 0.9),
                mean_error=float(errs.mean()),
            )
        )
    return out
