"""Inconsistency indices: SI, CR (via sampled ASI), GI, triad-based KI and ATI."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import SAATY_SCALE, SaatyScale, _as_matrix
from .prioritize import gm_estimate, rev_estimate

__all__ = [
    "Triad",
    "IndexReport",
    "compute_si",
    "estimate_asi",
    "compute_cr",
    "compute_gi",
    "triad_inconsistency",
    "enumerate_triads",
    "compute_ki",
    "compute_ati",
    "compute_report",
]


@dataclass(frozen=True)
class Triad:
    """Upper-triangle entry triple (a_ik, a_ij, a_kj) for i < k < j."""

    alpha: float
    beta: float
    chi: float
    positions: tuple  # (i, k, j), zero-based

    def __post_init__(self):
        if min(self.alpha, self.beta, self.chi) <= 0:
            raise ValueError("triad components must be positive")


@dataclass(frozen=True)
class IndexReport:
    """The five index values for one PCM; cr is None when no ASI was supplied."""

    si: float
    cr: Optional[float]
    gi: float
    ki: float
    ati: float

    def as_dict(self) -> dict:
        return {"si": self.si, "cr": self.cr, "gi": self.gi, "ki": self.ki, "ati": self.ati}

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def compute_si(pcm) -> float:
    """Saaty's index (lambda_max - n) / (n - 1)."""
    a = _as_matrix(pcm)
    n = a.shape[0]
    return (rev_estimate(a).lambda_max - n) / (n - 1)


def estimate_asi(
    n: int,
    sample_size: int = 500,
    seed: int = 0,
    scale: SaatyScale = SAATY_SCALE,
) -> float:
    """Mean SI over random reciprocal matrices with scale-valued upper triangles."""
    if n < 3:
        raise ValueError("need n >= 3")
    if sample_size < 1:
        raise ValueError("need sample_size >= 1")
    rng = np.random.default_rng(seed)
    vals = scale.as_array()
    iu, ju = np.triu_indices(n, k=1)
    total = 0.0
    for _ in range(sample_size):
        a = np.ones((n, n))
        a[iu, ju] = rng.choice(vals, size=iu.size)
        a[ju, iu] = 1.0 / a[iu, ju]
        total += compute_si(a)
    return total / sample_size


def compute_cr(pcm, asi: float) -> float:
    """Consistency ratio SI / ASI.  Informational only; no verdict attached."""
    if asi <= 0:
        raise ValueError("asi must be positive")
    return compute_si(pcm) / asi


def compute_gi(pcm) -> float:
    """Geometric consistency index from the GM weights, natural logarithm."""
    a = _as_matrix(pcm)
    n = a.shape[0]
    if n < 3:
        raise ValueError("need n >= 3")
    w = gm_estimate(a).weights
    iu, ju = np.triu_indices(n, k=1)
    terms = np.log(a[iu, ju] * w[ju] / w[iu]) ** 2
    return 2.0 / ((n - 1) * (n - 2)) * float(terms.sum())


def triad_inconsistency(t: Triad) -> float:
    """min(|1 - beta/(alpha*chi)|, |1 - alpha*chi/beta|); zero iff beta == alpha*chi."""
    prod = t.alpha * t.chi
    return min(abs(1.0 - t.beta / prod), abs(1.0 - prod / t.beta))


def enumerate_triads(pcm) -> list:
    """All C(n,3) upper-triangle triads, one per index triple i < k < j."""
    a = _as_matrix(pcm)
    n = a.shape[0]
    if n < 3:
        raise ValueError("need n >= 3")
    return [
        Triad(a[i, k], a[i, j], a[k, j], (i, k, j))
        for i, k, j in itertools.combinations(range(n), 3)
    ]


def triad_values(pcm) -> np.ndarray:
    """Vector of TI values over all upper-triangle triads."""
    a = _as_matrix(pcm)
    n = a.shape[0]
    triples = np.array(list(itertools.combinations(range(n), 3)))
    alpha = a[triples[:, 0], triples[:, 1]]
    beta = a[triples[:, 0], triples[:, 2]]
    chi = a[triples[:, 1], triples[:, 2]]
    prod = alpha * chi
    return np.minimum(np.abs(1.0 - beta / prod), np.abs(1.0 - prod / beta))


def compute_ki(pcm) -> float:
    """Koczkodaj's index: maximum triad inconsistency."""
    return float(np.max(triad_values(pcm)))


def compute_ati(pcm) -> float:
    """Average triad inconsistency over all upper-triangle triads."""
    return float(np.mean(triad_values(pcm)))


def compute_report(pcm, asi: Optional[float] = None) -> IndexReport:
    """All five indices at once; cr only when an ASI estimate is supplied."""
    ti = triad_values(pcm)
    si = compute_si(pcm)
    return IndexReport(
        si=si,
        cr=(si / asi) if asi is not None else None,
        gi=compute_gi(pcm),
        ki=float(np.max(ti)),
        ati=float(np.mean(ti)),
    )
