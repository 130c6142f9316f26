"""Glauber (heat-bath) dynamics for pairwise Ising models.

A sweep is ``p`` single-site updates. Site ``i`` is redrawn from
``P(x_i = +1 | rest) = 1 / (1 + exp(-2 (sum_j theta_ij x_j + H_i)))``.
Randomness is pre-drawn in blocks from a NumPy ``Generator`` and handed to
a compiled kernel, so a chain is reproducible bit-for-bit from its seed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numba
import numpy as np

from isinglearn.graph import IsingParams, SampleSet

DEFAULT_MIXING_CAP = 100_000
BLOCK_SWEEPS = 2048


@numba.njit(cache=True)
def _sweeps(state, ptr, nbr, wts, fields, sites, uniforms, n_sweeps, out, thin):
    """Run ``n_sweeps`` sweeps in place; every ``thin`` sweeps copy the state
    into the next row of ``out`` (if ``out`` has rows)."""
    p = state.shape[0]
    k = 0
    row = 0
    for s in range(n_sweeps):
        for _ in range(p):
            i = sites[k]
            h = fields[i]
            for q in range(ptr[i], ptr[i + 1]):
                h += wts[q] * state[nbr[q]]
            if uniforms[k] * (1.0 + np.exp(-2.0 * h)) < 1.0:
                state[i] = 1
            else:
                state[i] = -1
            k += 1
        if out.shape[0] > 0 and (s + 1) % thin == 0:
            for j in range(p):
                out[row, j] = state[j]
            row += 1
    return row


@numba.njit(cache=True)
def _sweeps_until_flip(state, ptr, nbr, wts, fields, sites, uniforms, n_sweeps):
    """Sweep until the total magnetization is <= 0; return sweeps used or -1."""
    p = state.shape[0]
    m = 0
    for j in range(p):
        m += state[j]
    k = 0
    for s in range(n_sweeps):
        for _ in range(p):
            i = sites[k]
            h = fields[i]
            for q in range(ptr[i], ptr[i + 1]):
                h += wts[q] * state[nbr[q]]
            old = state[i]
            if uniforms[k] * (1.0 + np.exp(-2.0 * h)) < 1.0:
                state[i] = 1
            else:
                state[i] = -1
            m += state[i] - old
            k += 1
        if m <= 0:
            return s + 1
    return -1


class _Kernel:
    """CSR view of the coupling structure."""

    def __init__(self, params: IsingParams):
        p = params.p
        nbrs: list[list[tuple[int, float]]] = [[] for _ in range(p)]
        for (i, j), v in params.couplings.items():
            nbrs[i].append((j, v))
            nbrs[j].append((i, v))
        self.p = p
        self.ptr = np.zeros(p + 1, dtype=np.int64)
        self.ptr[1:] = np.cumsum([len(a) for a in nbrs])
        self.nbr = np.array([j for a in nbrs for j, _ in a], dtype=np.int64)
        self.wts = np.array([v for a in nbrs for _, v in a], dtype=np.float64)
        self.fields = params.field_vector().astype(np.float64)

    def draws(self, rng: np.random.Generator, sweeps: int, scan: str):
        n = sweeps * self.p
        if scan == "random":
            sites = rng.integers(0, self.p, size=n, dtype=np.int64)
        elif scan == "sequential":
            sites = np.tile(np.arange(self.p, dtype=np.int64), sweeps)
        else:
            raise ValueError(f"unknown scan order {scan!r}")
        return sites, rng.random(n)

    def run(self, state, rng, sweeps, scan, out=None, thin=1):
        """Advance ``state`` by ``sweeps`` sweeps, filling ``out`` every ``thin`` sweeps."""
        filled = 0
        done = 0
        empty = np.zeros((0, self.p), dtype=np.int8)
        while done < sweeps:
            b = min(BLOCK_SWEEPS * thin if out is not None else BLOCK_SWEEPS, sweeps - done)
            sites, u = self.draws(rng, b, scan)
            target = empty if out is None else out[filled:]
            filled += _sweeps(state, self.ptr, self.nbr, self.wts, self.fields,
                              sites, u, b, target, thin)
            done += b
        return filled


def glauber_sweep(params: IsingParams, state: np.ndarray, rng: np.random.Generator,
                  scan: str = "random") -> np.ndarray:
    """One sweep starting from ``state``; returns the new configuration."""
    x = np.array(state, dtype=np.int8)
    if x.shape != (params.p,) or not np.all(np.abs(x) == 1):
        raise ValueError("state must be a length-p vector of +-1")
    _Kernel(params).run(x, rng, 1, scan)
    return x


def site_flip_probability(params: IsingParams, state: np.ndarray, i: int) -> float:
    """Probability that a heat-bath update at ``i`` moves ``x_i`` to ``-x_i``."""
    h = params.field_at(i) + sum(params.coupling(i, j) * state[j] for j in range(params.p))
    p_plus = 1.0 / (1.0 + np.exp(-2.0 * h))
    return float(1.0 - p_plus if state[i] == 1 else p_plus)


@dataclass(frozen=True)
class MixingEstimate:
    sweeps: int
    cap_hit: bool


def estimate_mixing_sweeps(params: IsingParams, rng: np.random.Generator,
                           cap: int = DEFAULT_MIXING_CAP, scan: str = "random") -> MixingEstimate:
    """Sweeps needed, starting from all +1, until the total bias ``sum_i x_i``
    first becomes <= 0. Returns ``cap`` with ``cap_hit`` set if it never does."""
    k = _Kernel(params)
    state = np.ones(params.p, dtype=np.int8)
    done = 0
    while done < cap:
        b = min(BLOCK_SWEEPS, cap - done)
        sites, u = k.draws(rng, b, scan)
        used = _sweeps_until_flip(state, k.ptr, k.nbr, k.wts, k.fields, sites, u, b)
        if used >= 0:
            return MixingEstimate(done + used, False)
        done += b
    return MixingEstimate(cap, True)


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling policy.

    ``burn_in_sweeps="auto"`` uses ``burn_in_multiplier`` times the bias
    sign-change estimate. ``n`` rows are split over ``chains`` independent
    chains, each with its own stream spawned from ``seed``.
    """

    seed: int
    n: int
    burn_in_sweeps: int | Literal["auto"] = "auto"
    thinning_sweeps: int = 1
    scan: Literal["random", "sequential"] = "random"
    chains: int = 1
    mixing_cap: int = DEFAULT_MIXING_CAP
    burn_in_multiplier: int = 10

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.thinning_sweeps < 1:
            raise ValueError("thinning_sweeps must be >= 1")
        if self.chains < 1 or self.chains > self.n:
            raise ValueError("need 1 <= chains <= n")
        if self.burn_in_sweeps != "auto" and int(self.burn_in_sweeps) < 0:
            raise ValueError("burn_in_sweeps must be >= 0 or 'auto'")
        if self.scan not in ("random", "sequential"):
            raise ValueError(f"unknown scan order {self.scan!r}")


def draw_samples(params: IsingParams, cfg: SamplerConfig) -> SampleSet:
    """Thinned Glauber samples, deterministic in ``cfg.seed``.

    Each chain starts from a uniformly random configuration. The mixing
    estimate (for ``"auto"`` burn-in) uses its own stream so it does not
    perturb the chains.
    """
    ss = np.random.SeedSequence(cfg.seed)
    mix_seq, *chain_seqs = ss.spawn(cfg.chains + 1)
    meta: dict = {
        "seed": cfg.seed, "n": cfg.n, "thinning_sweeps": cfg.thinning_sweeps,
        "scan": cfg.scan, "chains": cfg.chains, "graph_hash": params.digest(),
    }
    if cfg.burn_in_sweeps == "auto":
        est = estimate_mixing_sweeps(params, np.random.default_rng(mix_seq), cfg.mixing_cap, cfg.scan)
        burn = cfg.burn_in_multiplier * est.sweeps
        meta.update(burn_in="auto", mixing_sweeps=est.sweeps, mixing_cap_hit=est.cap_hit)
        if est.cap_hit:
            meta["warning"] = f"mixing estimate hit cap {cfg.mixing_cap}"
            warnings.warn(meta["warning"], RuntimeWarning, stacklevel=2)
    else:
        burn = int(cfg.burn_in_sweeps)
        meta["burn_in"] = burn
    meta["burn_in_sweeps"] = burn

    k = _Kernel(params)
    sizes = [cfg.n // cfg.chains + (1 if c < cfg.n % cfg.chains else 0) for c in range(cfg.chains)]
    rows = np.empty((cfg.n, params.p), dtype=np.int8)
    start = 0
    for seq, m in zip(chain_seqs, sizes):
        rng = np.random.default_rng(seq)
        state = (2 * rng.integers(0, 2, size=params.p) - 1).astype(np.int8)
        k.run(state, rng, burn, cfg.scan)
        got = k.run(state, rng, m * cfg.thinning_sweeps, cfg.scan, rows[start:start + m], cfg.thinning_sweeps)
        assert got == m
        start += m
    return SampleSet(rows, meta)
