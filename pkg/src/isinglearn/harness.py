"""Seeded success-probability sweeps over coupling, regularization and sample size.

A cell is one (graph seed, theta, lambda0, n) point. Each cell runs
``trials`` independent sample draws on its graph. Under the ``per-vertex``
criterion every vertex of every trial is one Bernoulli outcome, so the
``trials`` column counts outcomes, not draws.

Seeds are derived by hashing cell coordinates together with the master
seed, so extending a grid never changes existing cells. Samples do not
depend on ``lambda0``: every regularization value sees the same draws.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

from isinglearn import __version__
from isinglearn.generators import make_graph
from isinglearn.gibbs import SamplerConfig, draw_samples
from isinglearn.graph import Graph, IsingParams, max_degree
from isinglearn.learners import (default_eps_gamma, default_tau, ind_learn, indd_learn, rlr_learn,
                                 scaled_lambda, thr_learn)
from isinglearn.learners.stats import Statistics

CSV_COLUMNS = ("family", "p", "delta", "seed", "theta", "lambda0", "lambda", "n",
               "trials", "successes", "p_succ", "flags")
CRITERIA = ("per-vertex", "exact-graph")
METHODS = ("rlr", "thr", "ind", "indd")
ENVELOPE_PARAMS = ("lambda0", "theta", "n", "seed")
RLR_OPTIONS = ("edge_tol", "tol", "max_iter", "accelerated")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep description; see ``from_dict`` for the JSON layout."""

    family: str
    graph_params: dict[str, Any]
    graph_seeds: tuple[int, ...]
    thetas: tuple[float, ...]
    ns: tuple[int, ...]
    method: str = "rlr"
    learner_params: dict[str, Any] = field(default_factory=dict)
    lambda_rule: str = "scaled"
    lambda0s: tuple[float, ...] = (1.0,)
    lambda_fixed: float | None = None
    trials: int = 1
    master_seed: int = 0
    criterion: str = "per-vertex"
    sampler: dict[str, Any] = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.graph_seeds or not self.thetas or not self.ns:
            raise ConfigError("graph seeds, theta grid and n grid must be nonempty")
        if any(n < 1 for n in self.ns):
            raise ConfigError("every n must be at least 1")
        if any(t < 0 for t in self.thetas):
            raise ConfigError("theta must be non-negative")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.method not in METHODS:
            raise ConfigError(f"unknown learner {self.method!r}")
        if self.criterion not in CRITERIA:
            raise ConfigError(f"unknown success criterion {self.criterion!r}")
        if self.method == "rlr":
            if self.lambda_rule == "scaled":
                if not self.lambda0s:
                    raise ConfigError("lambda0 grid must be nonempty")
            elif self.lambda_rule == "fixed":
                if self.lambda_fixed is None or self.lambda_fixed < 0:
                    raise ConfigError("fixed rule needs a non-negative lambda")
            else:
                raise ConfigError(f"unknown lambda rule {self.lambda_rule!r}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        try:
            g = d["graph"]
            learner = d.get("learner", {"method": "rlr"})
            lam = learner.get("lambda", {"rule": "scaled", "lambda0": [1.0]})
            return cls(
                family=g["family"],
                graph_params=dict(g.get("params", {})),
                graph_seeds=tuple(int(s) for s in g.get("seeds", [0])),
                thetas=tuple(float(t) for t in d["theta"]),
                ns=tuple(int(n) for n in d["n"]),
                method=learner.get("method", "rlr"),
                learner_params={k: v for k, v in learner.items() if k not in ("method", "lambda")},
                lambda_rule=lam.get("rule", "scaled"),
                lambda0s=tuple(float(x) for x in lam.get("lambda0", [1.0])),
                lambda_fixed=lam.get("value"),
                trials=int(d.get("trials", 1)),
                master_seed=int(d.get("master_seed", 0)),
                criterion=d.get("criterion", "per-vertex"),
                sampler=dict(d.get("sampler", {})),
                workers=int(d.get("workers", 1)),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def lambda_points(self) -> list[float | None]:
        if self.method != "rlr":
            return [None]
        if self.lambda_rule == "fixed":
            return [None]
        return list(self.lambda0s)


@dataclass(frozen=True)
class SweepRow:
    family: str
    p: int
    delta: int
    seed: int | str
    theta: float
    lambda0: float | None
    lam: float | None
    n: int
    trials: int
    successes: int
    flags: tuple[str, ...] = ()
    wall_time: float = field(default=0.0, compare=False)

    @property
    def p_succ(self) -> float:
        return self.successes / self.trials if self.trials else math.nan

    def csv_record(self) -> list[str]:
        return [self.family, str(self.p), str(self.delta), str(self.seed), repr(self.theta),
                _fmt(self.lambda0), _fmt(self.lam), str(self.n), str(self.trials),
                str(self.successes), repr(self.p_succ), ";".join(self.flags)]


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    manifest: dict[str, Any] = field(default_factory=dict, compare=False)


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(x)


def derive_seed(master: int, *coords: Any) -> int:
    """64-bit seed from the master seed and cell coordinates."""
    key = json.dumps([master, *coords], sort_keys=True, separators=(",", ":"))
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "little")


def _learn(cfg: ExperimentConfig, st: Statistics, g: Graph, theta: float, lam: float | None):
    lp = cfg.learner_params
    delta = int(lp.get("delta", max_degree(g)))
    if cfg.method == "rlr":
        opt = {k: v for k, v in lp.items() if k in RLR_OPTIONS}
        return rlr_learn(st, lam, **opt)
    if cfg.method == "thr":
        return thr_learn(st, lp["tau"] if "tau" in lp else default_tau(theta, delta))
    eps, gamma = default_eps_gamma(theta, delta)
    eps, gamma = lp.get("eps", eps), lp.get("gamma", gamma)
    if cfg.method == "ind":
        return ind_learn(st, delta, eps, gamma)
    return indd_learn(st, delta, eps, gamma, lp.get("kappa", math.tanh(theta)))


def _run_graph_theta_n(cfg: ExperimentConfig, gseed: int, theta: float, n: int) -> list[SweepRow]:
    """All lambda0 cells sharing one graph, coupling and sample size."""
    t0 = time.perf_counter()
    g = make_graph(cfg.family, gseed, **cfg.graph_params)
    params = IsingParams.uniform(g, theta)
    l0s = cfg.lambda_points()
    succ = {l0: 0 for l0 in l0s}
    count = {l0: 0 for l0 in l0s}
    flags: dict[Any, set[str]] = {l0: set() for l0 in l0s}
    lams: dict[Any, float | None] = {}
    for l0 in l0s:
        if cfg.method != "rlr":
            lams[l0] = None
        elif l0 is None:
            lams[l0] = float(cfg.lambda_fixed)
        else:
            lams[l0] = scaled_lambda(l0, theta, g.p, n)
    for trial in range(cfg.trials):
        seed = derive_seed(cfg.master_seed, cfg.family, cfg.graph_params, gseed, theta, n, trial)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                s = draw_samples(params, SamplerConfig(seed=seed, n=n, **cfg.sampler))
        except Exception as exc:  # recorded in-row; the sweep goes on
            for l0 in l0s:
                flags[l0].add(f"error:sampler:{type(exc).__name__}")
            continue
        sampler_flag = "mixing_cap_hit" if s.meta.get("mixing_cap_hit") else None
        st = Statistics.from_samples(s)
        for l0 in l0s:
            if sampler_flag:
                flags[l0].add(sampler_flag)
            try:
                res = _learn(cfg, st, g, theta, lams[l0])
            except Exception as exc:
                flags[l0].add(f"error:learner:{type(exc).__name__}")
                continue
            if res.flags:
                flags[l0].add("nonconverged")
            if cfg.criterion == "per-vertex":
                ok = res.vertex_successes(g)
                succ[l0] += sum(ok)
                count[l0] += len(ok)
            else:
                succ[l0] += int(res.succeeded_against(g))
                count[l0] += 1
    wall = (time.perf_counter() - t0) / max(1, cfg.trials)
    return [SweepRow(cfg.family, g.p, max_degree(g), gseed, theta, l0, lams[l0], n,
                     count[l0], succ[l0], tuple(sorted(flags[l0])), wall) for l0 in l0s]


def _job(args):
    return _run_graph_theta_n(*args)


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Every (graph seed, theta, n) block, rows ordered by (seed, theta, lambda0, n)."""
    jobs = [(cfg, s, th, n) for s in cfg.graph_seeds for th in cfg.thetas for n in cfg.ns]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            blocks = list(ex.map(_job, jobs))
    else:
        blocks = [_job(j) for j in jobs]
    by_key = {}
    for (_, s, th, n), rows in zip(jobs, blocks):
        for r in rows:
            by_key[(s, th, r.lambda0, n)] = r
    ordered = tuple(by_key[(s, th, l0, n)] for s in cfg.graph_seeds for th in cfg.thetas
                    for l0 in cfg.lambda_points() for n in cfg.ns)
    manifest = {
        "version": __version__,
        "master_seed": cfg.master_seed,
        "config": _config_dict(cfg),
        "sample_seeds": {
            f"{s}/{th!r}/{n}/{t}": derive_seed(cfg.master_seed, cfg.family, cfg.graph_params, s, th, n, t)
            for s in cfg.graph_seeds for th in cfg.thetas for n in cfg.ns for t in range(cfg.trials)
        },
    }
    return SweepResult(ordered, manifest)


def _config_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    d = asdict(cfg)
    d.pop("workers")
    return d


def pool_seeds(res: SweepResult) -> SweepResult:
    """Sum outcomes over graph seeds; the pooled rows carry ``seed="all"``."""
    groups: dict[tuple, list[SweepRow]] = {}
    for r in res.rows:
        groups.setdefault((r.family, r.p, r.theta, r.lambda0, r.n), []).append(r)
    rows = []
    for rs in groups.values():
        flags = sorted({f for r in rs for f in r.flags})
        rows.append(replace(rs[0], seed="all", delta=max(r.delta for r in rs),
                            trials=sum(r.trials for r in rs), successes=sum(r.successes for r in rs),
                            flags=tuple(flags), wall_time=sum(r.wall_time for r in rs) / len(rs)))
    return SweepResult(tuple(rows), dict(res.manifest, pooled="seed"))


def envelope(res: SweepResult, over: str = "lambda0") -> SweepResult:
    """Per remaining cell, the row with the largest ``p_succ`` across ``over``.

    The kept row carries the maximizing value in its ``over`` column (first
    occurrence on ties), so enveloping twice changes nothing.
    """
    if over not in ENVELOPE_PARAMS:
        raise ValueError(f"cannot envelope over {over!r}")
    keys = [a for a in ("family", "p", "seed", "theta", "lambda0", "n") if a != over]
    best: dict[tuple, SweepRow] = {}
    for r in res.rows:
        k = tuple(getattr(r, a) for a in keys)
        cur = best.get(k)
        if cur is None or _better(r, cur):
            best[k] = r
    rows = tuple(best.values())
    argmax = {"/".join(map(str, k)): getattr(r, over) for k, r in best.items()}
    return SweepResult(rows, dict(res.manifest, envelope={"over": over, "argmax": argmax}))


def _better(a: SweepRow, b: SweepRow) -> bool:
    pa, pb = a.p_succ, b.p_succ
    if math.isnan(pb):
        return not math.isnan(pa)
    return not math.isnan(pa) and pa > pb


def emit_csv(res: SweepResult, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in res.rows:
            w.writerow(r.csv_record())


def _opt_float(s: str) -> float | None:
    return None if s == "" else float(s)


def read_csv(path: str | Path) -> SweepResult:
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for rec in rd:
            fam, p, delta, seed, theta, l0, lam, n, trials, succ, _, flags = rec
            rows.append(SweepRow(fam, int(p), int(delta), int(seed) if seed.lstrip("-").isdigit() else seed,
                                 float(theta), _opt_float(l0), _opt_float(lam), int(n), int(trials),
                                 int(succ), tuple(f for f in flags.split(";") if f)))
    return SweepResult(tuple(rows))


def write_manifest(res: SweepResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(res.manifest, sort_keys=True, indent=2) + "\n")


def rows_where(res: SweepResult, **match: Any) -> Sequence[SweepRow]:
    return [r for r in res.rows if all(getattr(r, k) == v for k, v in match.items())]
