"""Incoherence on the regular tree with a boundary field.

The rooted tree ``T(t)`` (root degree ``delta``, every other internal
vertex ``delta - 1`` children) carries coupling ``theta`` on each edge and
field ``h*`` on each leaf, where ``h*`` is the largest non-negative root of
``h = (delta - 1) atanh(tanh(theta) tanh(h))``. Because ``h*`` is a fixed
point of the leaf-to-root recursion, every subtree sends the same message
``h*`` upward, so the measure restricted to ``T(d)`` does not depend on the
outer depth ``t >= d``.

The Hessian blocks for the root are built from exact expectations:
messages are passed leaf-to-root in the log domain, the ``delta`` children
of the root are conditionally i.i.d. given the root spin (so the sum of
their spins is binomial), and ``E[X_i | X_child]`` for a vertex ``i`` down
one branch follows from a product of 2x2 transfer matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect, brentq
from scipy.special import logsumexp
from scipy.stats import binom

from isinglearn.generators import regular_tree
from isinglearn.graph import IsingParams

SPINS = np.array([-1.0, 1.0])
T_MAX = 30
CONVERGENCE_TOL = 1e-9


class ThresholdError(ValueError):
    """No crossing of the requested level in the scanned coupling range."""


def _fixed_point_residual(h: float, delta: int, theta: float) -> float:
    return h - (delta - 1) * math.atanh(math.tanh(theta) * math.tanh(h))


def boundary_field(delta: int, theta: float) -> float:
    """``h*`` by bisection; 0 when ``(delta-1) tanh(theta) <= 1``."""
    if delta < 2:
        raise ValueError("delta must be at least 2")
    if theta < 0:
        raise ValueError("theta must be non-negative")
    if (delta - 1) * math.tanh(theta) <= 1.0:
        return 0.0
    hi = (delta - 1) * theta + 1.0
    return bisect(_fixed_point_residual, 1e-300, hi, args=(delta, theta), xtol=1e-15, rtol=8.9e-16, maxiter=2000)


def boundary_field_iteration(delta: int, theta: float, damping: float = 0.5,
                             tol: float = 1e-14, max_iter: int = 1_000_000) -> float:
    """``h*`` by damped iteration of the recursion from a large starting field.

    Independent of :func:`boundary_field`; used to cross-check it.
    """
    h = (delta - 1) * theta + 1.0
    for _ in range(max_iter):
        nxt = (1 - damping) * h + damping * (delta - 1) * math.atanh(math.tanh(theta) * math.tanh(h))
        if abs(nxt - h) < tol:
            return nxt
        h = nxt
    raise RuntimeError("fixed-point iteration did not converge")


def _hbar_residual(h: float) -> float:
    t = math.tanh(h)
    return h * t - (1 - t * t) ** 2


def hbar_and_theta_tilde() -> tuple[float, float]:
    """``hbar``: positive root of ``h tanh h = (1 - tanh^2 h)^2``; ``theta_tilde = tanh(hbar)/hbar``."""
    hbar = bisect(_hbar_residual, 0.5, 0.8, xtol=1e-15, rtol=8.9e-16, maxiter=2000)
    return hbar, math.tanh(hbar) / hbar


def hbar_iteration(damping: float = 0.3, tol: float = 1e-15, max_iter: int = 100_000) -> float:
    """Second solver for ``hbar``: damped iteration of ``h = (1 - tanh^2 h)^2 / tanh h``."""
    h = 0.5
    for _ in range(max_iter):
        t = math.tanh(h)
        nxt = (1 - damping) * h + damping * (1 - t * t) ** 2 / t
        if abs(nxt - h) < tol:
            return nxt
        h = nxt
    raise RuntimeError("hbar iteration did not converge")


def tree_params(delta: int, t: int, theta: float) -> IsingParams:
    """Finite ``T(t)`` model with ``h*`` on the leaves (for enumeration checks)."""
    g = regular_tree(delta, t)
    h = boundary_field(delta, theta) if delta >= 3 else 0.0
    fields = [0.0] * g.p
    if t > 0:
        for leaf in g.meta["leaves"]:
            fields[leaf] = h
    return IsingParams.uniform(g, theta, fields)


def _to_parent(theta: float, logm: np.ndarray) -> np.ndarray:
    """``log sum_y exp(theta x y + logm(y))`` for ``x = -1, +1``, shifted to mean zero."""
    out = logsumexp(theta * np.outer(SPINS, SPINS) + logm[None, :], axis=1)
    return out - out.mean()


@dataclass(frozen=True, eq=False)
class TreeIncoherence:
    delta: int
    theta: float
    t: int
    h_star: float
    Q_SS: np.ndarray
    Q_iS: np.ndarray              # row for the depth-t vertex on branch 0
    entry: float                  # |Q_iS Q_SS^{-1} 1| at depth t
    sigma_min: float
    entries_by_depth: np.ndarray  # index d-2 holds the entry for depth d = 2..t

    @property
    def max_entry(self) -> float:
        return float(self.entries_by_depth.max())

    def to_dict(self) -> dict:
        return {"delta": self.delta, "theta": self.theta, "t": self.t, "h_star": self.h_star,
                "Q_SS": self.Q_SS.tolist(), "Q_iS": self.Q_iS.tolist(), "entry": self.entry,
                "sigma_min": self.sigma_min, "entries_by_depth": self.entries_by_depth.tolist()}


def tree_incoherence(delta: int, theta: float, t: int) -> TreeIncoherence:
    if delta < 3:
        raise ValueError("delta must be at least 3")
    if t < 2:
        raise ValueError("need t >= 2 so that the root has non-neighbors")
    h = boundary_field(delta, theta)

    # up[L]: log-potential of a level-L vertex with its subtree summed out
    up = [None] * (t + 1)
    up[t] = h * SPINS
    for L in range(t - 1, 0, -1):
        # normalized so that deep trees do not lose the field to cancellation
        up[L] = (delta - 1) * _to_parent(theta, up[L + 1])

    # root spin and conditionally iid children
    log_root = delta * _to_parent(theta, up[1])
    log_root -= logsumexp(log_root)
    child = theta * np.outer(SPINS, SPINS) + up[1][None, :]
    child -= logsumexp(child, axis=1, keepdims=True)
    q_plus = np.exp(child[:, 1])

    k = np.arange(delta + 1)
    M = 2.0 * k - delta
    logP = np.stack([log_root[a] + binom.logpmf(k, delta, q_plus[a]) for a in range(2)])
    P = np.exp(logP - logsumexp(logP))
    g = 1.0 - np.tanh(theta * M) ** 2
    Eg = float((P * g).sum())
    Eg_x1 = float((P * g * M).sum()) / delta
    Eg_x1x2 = float((P * g * (M * M - delta)).sum()) / (delta * (delta - 1))

    Q_SS = np.full((delta, delta), Eg_x1x2)
    np.fill_diagonal(Q_SS, Eg)
    sigma_min = float(np.linalg.eigvalsh(Q_SS)[0])
    z = np.linalg.solve(Q_SS, np.ones(delta))

    entries = np.empty(t - 1)
    Q_iS = None
    M = np.eye(2)  # product of parent-to-child transitions from level 1 down to level d
    for d in range(2, t + 1):
        M = M @ _transition(theta, up[d])
        f = M @ SPINS  # E[X_i | X_1 = -1, +1] for i at depth d below child 1
        f_bar, f_slope = (f[1] + f[0]) / 2, (f[1] - f[0]) / 2
        row = np.full(delta, f_bar * Eg_x1 + f_slope * Eg_x1x2)
        row[0] = f_bar * Eg_x1 + f_slope * Eg
        entries[d - 2] = abs(float(row @ z))
        if d == t:
            Q_iS = row
    return TreeIncoherence(delta, theta, t, h, Q_SS, Q_iS, float(entries[-1]), sigma_min, entries)


def _transition(theta: float, logm: np.ndarray) -> np.ndarray:
    """Row-stochastic ``P(child = y | parent = x)`` given the child's subtree potential."""
    a = theta * np.outer(SPINS, SPINS) + logm[None, :]
    return np.exp(a - np.logaddexp(a[:, :1], a[:, 1:]))


@dataclass(frozen=True)
class ConvergedIncoherence:
    delta: int
    theta: float
    entry: float        # value at the depth where the sweep stopped
    max_entry: float    # max over swept depths
    argmax_depth: int
    depth: int
    converged: bool
    sigma_min: float


def converged_incoherence(delta: int, theta: float, t_max: int = T_MAX,
                          tol: float = CONVERGENCE_TOL) -> ConvergedIncoherence:
    """Sweep the depth of the non-neighbor from 2 up to ``t_max`` and stop once
    the entry changes by less than ``tol`` between consecutive depths."""
    rep = tree_incoherence(delta, theta, t_max)
    e = rep.entries_by_depth
    stop = len(e) - 1
    converged = False
    for k in range(1, len(e)):
        if abs(e[k] - e[k - 1]) < tol:
            stop, converged = k, True
            break
    swept = e[: stop + 1]
    j = int(np.argmax(swept))
    return ConvergedIncoherence(delta, theta, float(swept[-1]), float(swept[j]), j + 2,
                                stop + 2, converged, rep.sigma_min)


def tree_threshold(delta: int, eps: float = 0.0, tol: float = 1e-8, grid: int = 400,
                   theta_max: float | None = None) -> float:
    """Smallest coupling at which the swept tree incoherence reaches ``1 + eps``.

    A grid scan over ``(0, theta_max]`` brackets the first crossing, then
    Brent's method refines it to ``tol``.
    """
    if delta < 4:
        raise ValueError("delta must be at least 4")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    theta_max = theta_max if theta_max is not None else 4.0 / delta
    level = 1.0 + eps

    def excess(th: float) -> float:
        return converged_incoherence(delta, th).max_entry - level

    thetas = np.linspace(theta_max / grid, theta_max, grid)
    prev = 0.0
    for th in thetas:
        if excess(th) >= 0:
            if prev == 0.0:
                return float(th)
            return float(brentq(excess, prev, th, xtol=tol))
        prev = th
    raise ThresholdError(f"incoherence never reaches {level} for delta={delta} on (0, {theta_max}]")
