"""Brute-force inference over all ``2**p`` spin configurations.

This is the ground truth the sampler, the learners and the tree recursion
are checked against, so it stays deliberately simple: tabulate every
configuration, weight it, normalize with log-sum-exp.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np
from scipy.special import logsumexp

from isinglearn.graph import IsingParams

MAX_ENUM_P = 20
SINGULAR_TOL = 1e-10


class EnumerationError(ValueError):
    """Model too large for exhaustive enumeration."""


class IncoherenceError(ValueError):
    """Incoherence quantities are undefined for this input."""


def _guard(p: int) -> None:
    if p > MAX_ENUM_P:
        raise EnumerationError(f"p={p} exceeds the enumeration limit {MAX_ENUM_P}")


@lru_cache(maxsize=8)
def all_states(p: int) -> np.ndarray:
    """Every configuration in binary order: row ``s`` has ``x_i = +1`` iff bit ``i`` of ``s`` is set."""
    _guard(p)
    idx = np.arange(2**p, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(p, dtype=np.int64)) & 1
    states = (2 * bits - 1).astype(np.int8)
    states.setflags(write=False)
    return states


def log_weights(params: IsingParams, states: np.ndarray) -> np.ndarray:
    lw = np.zeros(states.shape[0])
    for (i, j), v in params.couplings.items():
        lw += v * (states[:, i] * states[:, j])
    if params.fields is not None:
        lw += states @ np.asarray(params.fields)
    return lw


@dataclass(frozen=True, eq=False)
class ExactDist:
    params: IsingParams
    states: np.ndarray
    logZ: float
    probs: np.ndarray

    @classmethod
    def from_params(cls, params: IsingParams) -> "ExactDist":
        states = all_states(params.p)
        lw = log_weights(params, states)
        logZ = float(logsumexp(lw))
        probs = np.exp(lw - logZ)
        probs.setflags(write=False)
        return cls(params, states, logZ, probs)

    def expect(self, values: np.ndarray) -> float:
        return float(self.probs @ values)

    def moment(self, i: int, j: int) -> float:
        return self.expect(self.states[:, i] * self.states[:, j].astype(float))

    def local_field(self, r: int, theta_row: np.ndarray | None = None) -> np.ndarray:
        """``h = sum_t theta_rt x_t + H_r`` per configuration.

        ``theta_row`` is indexed over ``V \\ r`` in increasing order; by
        default the true couplings of ``r`` are used.
        """
        others = [v for v in range(self.params.p) if v != r]
        if theta_row is None:
            theta_row = np.array([self.params.coupling(r, v) for v in others])
        X = self.states[:, others].astype(float)
        return X @ theta_row + self.params.field_at(r)


@lru_cache(maxsize=32)
def exact_dist(params: IsingParams) -> ExactDist:
    return ExactDist.from_params(params)


def distribution(params: IsingParams) -> ExactDist:
    _guard(params.p)
    return exact_dist(params)


def partition_function(params: IsingParams) -> float:
    """``log Z``."""
    return distribution(params).logZ


def pair_correlation(params: IsingParams, i: int, j: int) -> float:
    if i == j:
        return 1.0
    return distribution(params).moment(i, j)


def magnetization(params: IsingParams, i: int) -> float:
    d = distribution(params)
    return d.expect(d.states[:, i].astype(float))


def correlation_matrix(params: IsingParams) -> np.ndarray:
    d = distribution(params)
    X = d.states.astype(float)
    C = (X * d.probs[:, None]).T @ X
    np.fill_diagonal(C, 1.0)
    return C


def conditional_marginal(params: IsingParams, r: int, assignment: Mapping[int, int]) -> float:
    """``P(X_r = +1 | X_A = x_A)`` for a partial assignment on ``A`` not containing ``r``."""
    if r in assignment:
        raise ValueError("conditioning set must not contain r")
    d = distribution(params)
    mask = np.ones(d.states.shape[0], dtype=bool)
    for v, x in assignment.items():
        if x not in (-1, 1):
            raise ValueError(f"spin value {x!r} for vertex {v}")
        mask &= d.states[:, v] == x
    den = d.probs[mask].sum()
    assert den > 0, "every configuration has positive probability"
    return float(d.probs[mask & (d.states[:, r] == 1)].sum() / den)


def population_objective(params: IsingParams, r: int, theta_row: np.ndarray) -> float:
    """Expected negative log conditional likelihood of ``x_r`` at ``theta_row``."""
    d = distribution(params)
    h = d.local_field(r, np.asarray(theta_row, dtype=float))
    xr = d.states[:, r].astype(float)
    return d.expect(np.logaddexp(h, -h) - xr * h)


def population_hessian(params: IsingParams, r: int) -> np.ndarray:
    """Hessian of the expected negative log conditional likelihood of
    ``x_r`` at the true couplings, over ``V \\ r`` in increasing order:
    ``Q_jk = E[(1 - tanh(h)^2) X_j X_k]``.
    """
    d = distribution(params)
    others = [v for v in range(params.p) if v != r]
    X = d.states[:, others].astype(float)
    w = d.probs * (1.0 - np.tanh(d.local_field(r)) ** 2)
    Q = (X * w[:, None]).T @ X
    return (Q + Q.T) / 2


@dataclass(frozen=True, eq=False)
class IncoherenceReport:
    r: int
    S: tuple[int, ...]
    Sc: tuple[int, ...]
    Q_SS: np.ndarray
    Q_ScS: np.ndarray
    incoherence_vector: np.ndarray
    max_entry: float
    sigma_min: float

    @property
    def violated(self) -> bool:
        return self.max_entry >= 1.0

    def to_dict(self) -> dict:
        return {
            "r": self.r, "S": list(self.S), "Sc": list(self.Sc),
            "Q_SS": self.Q_SS.tolist(), "Q_ScS": self.Q_ScS.tolist(),
            "incoherence_vector": self.incoherence_vector.tolist(),
            "max_entry": self.max_entry, "sigma_min": self.sigma_min,
            "violated": self.violated,
        }


def incoherence_from_hessian(r: int, S: list[int], Sc: list[int], Q_SS: np.ndarray,
                             Q_ScS: np.ndarray) -> IncoherenceReport:
    """``|Q_{S^c S} Q_SS^{-1} 1_S|`` with the sign vector fixed to all ones."""
    sigma_min = float(np.linalg.eigvalsh(Q_SS)[0])
    if sigma_min <= SINGULAR_TOL:
        raise IncoherenceError(f"Q_SS is singular (sigma_min={sigma_min:.3e})")
    z = np.linalg.solve(Q_SS, np.ones(len(S)))
    vec = np.abs(Q_ScS @ z)
    return IncoherenceReport(r, tuple(S), tuple(Sc), Q_SS, Q_ScS, vec,
                             float(vec.max()) if vec.size else 0.0, sigma_min)


def incoherence_check(params: IsingParams, r: int) -> IncoherenceReport:
    if not params.is_ferromagnetic:
        raise IncoherenceError("incoherence check assumes non-negative couplings")
    S = [v for v in range(params.p) if v != r and params.coupling(r, v) != 0.0]
    if not S:
        raise IncoherenceError(f"vertex {r} has no neighbors")
    others = [v for v in range(params.p) if v != r]
    Q = population_hessian(params, r)
    pos = {v: k for k, v in enumerate(others)}
    Sc = [v for v in others if v not in S]
    iS = [pos[v] for v in S]
    iSc = [pos[v] for v in Sc]
    return incoherence_from_hessian(r, S, Sc, Q[np.ix_(iS, iS)], Q[np.ix_(iSc, iS)])
