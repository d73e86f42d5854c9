"""Priority vector estimators: principal eigenvector (REV) and row geometric mean (GM)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PriorityVector, _as_matrix

__all__ = ["RevResult", "ConvergenceError", "rev_estimate", "gm_estimate"]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000


class ConvergenceError(RuntimeError):
    """Power iteration failed to converge; carries the last iterate."""

    def __init__(self, weights: np.ndarray, residual: float, iterations: int):
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.weights = weights
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class RevResult:
    weights: PriorityVector
    lambda_max: float
    iterations: int
    residual: float


def rev_estimate(pcm, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> RevResult:
    """Normalized principal right eigenvector via power iteration.

    Starts from the uniform vector and renormalizes by the component sum at
    each step; convergence is declared on the max successive-iterate
    difference.  The eigenvalue is refined at the end as the mean of the
    componentwise Rayleigh ratios (A w)_i / w_i.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = _as_matrix(pcm)
    n = a.shape[0]
    w = np.full(n, 1.0 / n)
    diff = np.inf
    for it in range(1, max_iter + 1):
        y = a @ w
        y /= y.sum()
        diff = float(np.max(np.abs(y - w)))
        w = y
        if diff <= tol:
            break
    else:
        it = max_iter
    lam = float(np.mean((a @ w) / w))
    residual = float(np.max(np.abs(a @ w - lam * w)))
    if diff > tol:
        raise ConvergenceError(w, residual, max_iter)
    return RevResult(PriorityVector.normalized(w), lam, it, residual)


def gm_estimate(pcm) -> PriorityVector:
    """Row geometric mean weights, normalized to sum 1."""
    a = _as_matrix(pcm)
    g = np.exp(np.mean(np.log(a), axis=1))
    return PriorityVector.normalized(g)
