"""l1-regularized pseudo-likelihood (logistic regression), ``Rlr(lambda)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from isinglearn.learners.result import LearnerResult, VertexResult
from isinglearn.learners.stats import Data, Statistics, as_statistics

EDGE_TOL = 1e-6


def _design(st: Statistics, r: int) -> tuple[np.ndarray, np.ndarray]:
    others = [v for v in range(st.p) if v != r]
    return st.rows[:, others], st.rows[:, r]


def pseudo_likelihood(theta_row: np.ndarray, data: Data, r: int) -> tuple[float, np.ndarray]:
    """Negative log conditional likelihood of ``x_r`` and its gradient.

    ``theta_row`` is indexed over ``V \\ r`` in increasing order. With
    ``h = sum_j theta_rj x_j`` the per-sample loss is
    ``log(2 cosh h) - x_r h`` and its gradient ``(tanh h - x_r) x_j``.
    """
    st = as_statistics(data)
    X, y = _design(st, r)
    return _objective(X, y, st.weights)(np.asarray(theta_row, dtype=float))


def _objective(X: np.ndarray, y: np.ndarray, w: np.ndarray) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    def f(theta: np.ndarray) -> tuple[float, np.ndarray]:
        h = X @ theta
        val = float(w @ (np.logaddexp(h, -h) - y * h))
        grad = X.T @ (w * (np.tanh(h) - y))
        return val, grad
    return f


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


@dataclass
class ProxResult:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    history: list[float]


def prox_gradient(f: Callable[[np.ndarray], tuple[float, np.ndarray]], x0: np.ndarray, lam: float,
                  step: float = 1.0, shrink: float = 0.5, tol: float = 1e-9,
                  max_iter: int = 100_000, accelerated: bool = False,
                  keep_history: bool = False) -> ProxResult:
    """Minimize ``f(x) + lam * ||x||_1`` by proximal gradient with backtracking.

    The step starts at ``step`` and only shrinks. Stops when successive
    iterates differ by less than ``tol`` in max-norm. Without acceleration
    the composite objective is non-increasing (checked under ``__debug__``).
    With ``accelerated=True`` (FISTA) momentum is reset whenever the
    objective goes up.
    """
    x = np.array(x0, dtype=float)
    fx, gx = f(x)
    F = fx + lam * np.abs(x).sum()
    history = [F] if keep_history else []
    y, fy, gy = x, fx, gx
    t_mom = 1.0
    for it in range(1, max_iter + 1):
        while True:
            z = soft_threshold(y - step * gy, step * lam)
            fz, gz = f(z)
            d = z - y
            # small slack keeps round-off from collapsing the step near the optimum
            if fz <= fy + gy @ d + (d @ d) / (2 * step) + 1e-13 * (1.0 + abs(fy)):
                break
            step *= shrink
            if step < 1e-20:
                raise FloatingPointError("line search collapsed")
        Fz = fz + lam * np.abs(z).sum()
        if __debug__ and not accelerated:
            assert Fz <= F + 1e-12 * (1.0 + abs(F)), "objective increased"
        change = float(np.max(np.abs(z - x))) if z.size else 0.0
        if accelerated and Fz > F and t_mom > 1.0:
            # adaptive restart: drop momentum and retry from the last iterate
            t_mom = 1.0
            y, fy, gy = x, fx, gx
            continue
        if accelerated:
            t_next = (1 + math.sqrt(1 + 4 * t_mom * t_mom)) / 2
            y = z + ((t_mom - 1) / t_next) * (z - x)
            t_mom = t_next
            fy, gy = f(y)
        else:
            y, fy, gy = z, fz, gz
        x, F, fx, gx = z, Fz, fz, gz
        if keep_history:
            history.append(F)
        if change < tol:
            return ProxResult(x, F, it, True, history)
    return ProxResult(x, F, max_iter, False, history)


def rlr_vertex(st: Statistics, r: int, lam: float, edge_tol: float = EDGE_TOL, **opt) -> VertexResult:
    X, y = _design(st, r)
    others = [v for v in range(st.p) if v != r]
    res = prox_gradient(_objective(X, y, st.weights), np.zeros(len(others)), lam, **opt)
    nb = tuple(v for v, th in zip(others, res.x) if th > edge_tol)
    return VertexResult(nb, {
        "theta_hat": {str(v): float(th) for v, th in zip(others, res.x)},
        "objective": res.objective, "iterations": res.iterations, "converged": res.converged,
    })


def rlr_learn(data: Data, lam: float, edge_tol: float = EDGE_TOL, **opt) -> LearnerResult:
    """Per-vertex ``argmin L(theta) + lam ||theta||_1``; edge ``(r, j)`` iff
    ``theta_hat_rj > edge_tol``. Extra keywords go to :func:`prox_gradient`."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    st = as_statistics(data)
    per_vertex = {r: rlr_vertex(st, r, lam, edge_tol, **opt) for r in range(st.p)}
    flags = tuple(f"nonconverged:{r}" for r, v in per_vertex.items() if not v.diagnostics["converged"])
    return LearnerResult("rlr", st.p, per_vertex, {"lambda": lam, "edge_tol": edge_tol}, flags)


def scaled_lambda(lambda0: float, theta: float, p: int, n: int) -> float:
    """``lambda = 2 lambda0 theta sqrt(log p / n)``."""
    return 2.0 * lambda0 * theta * math.sqrt(math.log(p) / n)
