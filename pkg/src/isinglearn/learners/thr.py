"""Correlation thresholding, ``Thr(tau)``."""

from __future__ import annotations

import math

import numpy as np

from isinglearn.learners.result import LearnerResult, VertexResult
from isinglearn.learners.stats import Data, as_statistics


class HypothesisError(ValueError):
    def __init__(self, message: str, boundary: float):
        super().__init__(message)
        self.boundary = boundary


def default_tau(theta: float, delta: int) -> float:
    """Midpoint ``(tanh(theta) + 1/(2 delta)) / 2``, valid for ``theta < atanh(1/(2 delta))``."""
    if delta <= 1:
        raise ValueError("default_tau needs delta > 1")
    boundary = math.atanh(1.0 / (2 * delta))
    if not theta < boundary:
        raise HypothesisError(f"theta={theta} must be below atanh(1/(2*delta))={boundary:.6g}", boundary)
    return (math.tanh(theta) + 1.0 / (2 * delta)) / 2


def thr_learn(data: Data, tau: float) -> LearnerResult:
    """Declare ``(i, j)`` an edge iff ``C_ij >= tau``."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    C = as_statistics(data).correlations()
    p = C.shape[0]
    per_vertex = {}
    for r in range(p):
        row = C[r]
        nb = tuple(int(j) for j in np.flatnonzero(row >= tau) if j != r)
        per_vertex[r] = VertexResult(nb, {"correlations": {str(j): float(row[j]) for j in range(p) if j != r}})
    return LearnerResult("thr", p, per_vertex, {"tau": tau})
