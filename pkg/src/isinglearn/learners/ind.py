"""Local independence tests ``Ind(eps, gamma)`` and ``IndD(eps, gamma, kappa)``.

For a candidate neighborhood ``U`` of ``r`` the score is

    min over (W, j in U) of max over assignments of
        | P(X_r=+1 | x_W, x_U) - P(X_r=+1 | x_W, x_U with x_j flipped) |

where ``W`` ranges over sets of at most ``delta`` vertices disjoint from
``U + {r}`` and an assignment counts only if both conditioning events have
probability above ``gamma / 2``. A ``(W, j)`` pair with no admissible
assignment scores ``-inf``, which rejects ``U``. The empty candidate scores
``+inf`` (vacuous minimum).
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from isinglearn.learners.result import LearnerResult, VertexResult
from isinglearn.learners.stats import Data, Statistics, as_statistics


def default_eps_gamma(theta: float, delta: int) -> tuple[float, float]:
    """``eps = sinh(2 theta) / 4`` and ``gamma = exp(-4 delta theta) 2^(-2 delta)``."""
    return math.sinh(2 * theta) / 4, math.exp(-4 * delta * theta) * 2.0 ** (-2 * delta)


def _subsets(pool: Sequence[int], max_size: int) -> Iterable[tuple[int, ...]]:
    for k in range(0, min(max_size, len(pool)) + 1):
        yield from combinations(pool, k)


def _pair_scores(st: Statistics, r: int, U: tuple[int, ...], W: tuple[int, ...], gamma: float) -> np.ndarray:
    """Inner max of the score for every ``j`` in ``U`` (``-inf`` if infeasible)."""
    T = st.joint_table((r,) + U + W)
    marg = T.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(marg > 0, T[1] / marg, np.nan)
    ok = marg > gamma / 2
    out = np.empty(len(U))
    for k in range(len(U)):
        feas = ok & np.flip(ok, axis=k)
        if not feas.any():
            out[k] = -np.inf
            continue
        out[k] = np.abs(cond - np.flip(cond, axis=k))[feas].max()
    return out


def score(data: Data, r: int, U: Iterable[int], delta: int, gamma: float,
          pool: Iterable[int] | None = None, stop_at: float | None = None) -> float:
    """Score of candidate neighborhood ``U`` for vertex ``r``.

    ``pool`` restricts the conditioning sets ``W``. With ``stop_at`` the
    search returns as soon as the running minimum drops to or below it.
    """
    st = as_statistics(data)
    U = tuple(sorted(U))
    if r in U:
        raise ValueError("candidate set must not contain r")
    if len(U) > delta:
        raise ValueError("candidate set larger than delta")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not U:
        return math.inf
    base = range(st.p) if pool is None else sorted(set(pool))
    avail = [v for v in base if v != r and v not in U]
    best = math.inf
    for W in _subsets(avail, delta):
        best = min(best, float(_pair_scores(st, r, U, W, gamma).min()))
        if stop_at is not None and best <= stop_at:
            break
    return best


def _learn_vertex(st: Statistics, r: int, candidates: list[int], delta: int, eps: float,
                  gamma: float, pool: list[int] | None) -> VertexResult:
    checked = 0
    for k in range(min(delta, len(candidates)), 0, -1):
        for U in combinations(candidates, k):
            checked += 1
            s = score(st, r, U, delta, gamma, pool, stop_at=eps / 2)
            if s > eps / 2:
                return VertexResult(U, {"score": s, "candidates_checked": checked})
    return VertexResult((), {"score": None, "candidates_checked": checked})


def ind_learn(data: Data, delta: int, eps: float, gamma: float) -> LearnerResult:
    """Neighborhood of ``r`` = largest ``U`` with ``|U| <= delta`` and
    ``score(U) > eps/2``; lexicographically smallest among equal sizes."""
    if eps <= 0 or gamma <= 0:
        raise ValueError("eps and gamma must be positive")
    st = as_statistics(data)
    per_vertex = {}
    for r in range(st.p):
        cands = [v for v in range(st.p) if v != r]
        per_vertex[r] = _learn_vertex(st, r, cands, delta, eps, gamma, None)
    return LearnerResult("ind", st.p, per_vertex, {"delta": delta, "eps": eps, "gamma": gamma})


def potential_neighbors(C: np.ndarray, r: int, kappa: float) -> list[int]:
    """``B(r) = {i : C_ri > kappa / 2}``."""
    return [int(i) for i in np.flatnonzero(C[r] > kappa / 2) if i != r]


def indd_learn(data: Data, delta: int, eps: float, gamma: float, kappa: float) -> LearnerResult:
    """``Ind`` with both the candidate sets and the conditioning sets drawn
    from the thresholded pool ``B(r)``."""
    if eps <= 0 or gamma <= 0 or kappa <= 0:
        raise ValueError("eps, gamma and kappa must be positive")
    st = as_statistics(data)
    C = st.correlations()
    per_vertex = {}
    for r in range(st.p):
        B = potential_neighbors(C, r, kappa)
        vr = _learn_vertex(st, r, B, delta, eps, gamma, B)
        vr.diagnostics["B"] = B
        per_vertex[r] = vr
    return LearnerResult("indd", st.p, per_vertex,
                         {"delta": delta, "eps": eps, "gamma": gamma, "kappa": kappa})
