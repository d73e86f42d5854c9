"""Estimation-error loss functions between a true priority vector and an estimate."""
from __future__ import annotations

import numpy as np

from .core import PriorityVector

__all__ = ["avg_absolute_error", "avg_relative_error"]


def _as_vector(v) -> np.ndarray:
    if isinstance(v, PriorityVector):
        return v.weights
    return np.asarray(v, dtype=float)


def avg_absolute_error(v, w) -> float:
    """Mean componentwise absolute difference (1/N) sum |v_i - w_i|."""
    tv, est = _as_vector(v), _as_vector(w)
    if tv.shape != est.shape:
        raise ValueError("vectors must have equal dimension")
    return float(np.mean(np.abs(tv - est)))


def avg_relative_error(v, w) -> float:
    """Mean |v_i - w_i| / v_i with the TRUE vector v in the denominator.

    Returned as a fraction; percent formatting belongs to the reporting layer.
    """
    tv, est = _as_vector(v), _as_vector(w)
    if tv.shape != est.shape:
        raise ValueError("vectors must have equal dimension")
    if np.any(tv <= 0):
        raise ValueError("true vector components must be positive")
    return float(np.mean(np.abs(tv - est) / tv))
