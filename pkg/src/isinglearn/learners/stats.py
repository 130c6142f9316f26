"""Weighted spin tables.

Every learner consumes a :class:`Statistics`: distinct configurations with
probability weights. From a :class:`SampleSet` the weights are empirical
frequencies; from the exact oracle they are the model probabilities, which
gives the population (``n -> infinity``) version of each learner with no
code changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from isinglearn import exact
from isinglearn.graph import IsingParams, SampleSet


@dataclass(frozen=True, eq=False)
class Statistics:
    rows: np.ndarray      # (m, p) float64 with entries +-1
    weights: np.ndarray   # (m,), sums to 1
    source: str = "empirical"
    n: int | None = None  # sample count behind empirical weights

    @property
    def p(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def from_samples(cls, s: SampleSet) -> "Statistics":
        uniq, counts = np.unique(s.rows, axis=0, return_counts=True)
        return cls(uniq.astype(np.float64), counts / s.n, "empirical", s.n)

    @classmethod
    def from_params(cls, params: IsingParams) -> "Statistics":
        d = exact.distribution(params)
        return cls(d.states.astype(np.float64), np.asarray(d.probs), "exact", None)

    def correlations(self) -> np.ndarray:
        C = (self.rows * self.weights[:, None]).T @ self.rows
        C = (C + C.T) / 2
        np.fill_diagonal(C, 1.0)
        return np.clip(C, -1.0, 1.0)

    def joint_table(self, variables: Sequence[int]) -> np.ndarray:
        """Probability of every joint value of ``variables``.

        Returned array has one axis of length 2 per variable, index 0 for
        spin -1 and 1 for spin +1, axes in the order given.
        """
        k = len(variables)
        if k == 0:
            return np.array(self.weights.sum())
        bits = (self.rows[:, list(variables)] > 0).astype(np.int64)
        code = bits @ (1 << np.arange(k - 1, -1, -1, dtype=np.int64))
        flat = np.bincount(code, weights=self.weights, minlength=1 << k)
        return flat.reshape((2,) * k)


Data = Union[SampleSet, Statistics, IsingParams]


def as_statistics(data: Data) -> Statistics:
    """Accept samples, precomputed statistics, or a model (population level)."""
    if isinstance(data, Statistics):
        return data
    if isinstance(data, SampleSet):
        return Statistics.from_samples(data)
    if isinstance(data, IsingParams):
        return Statistics.from_params(data)
    raise TypeError(f"cannot build statistics from {type(data).__name__}")


def empirical_correlations(s: SampleSet | Statistics) -> np.ndarray:
    """``C_ij = (1/n) sum_l x_i^(l) x_j^(l)``."""
    if isinstance(s, SampleSet):
        X = s.rows.astype(np.float64)
        C = X.T @ X / s.n
        np.fill_diagonal(C, 1.0)
        return C
    return s.correlations()
