"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest

from conftest import brute_force_probs, cycle, path
from isinglearn import exact, gibbs
from isinglearn.cli import main
from isinglearn.generators import diluted_grid, random_regular, single_edge_graph, star
from isinglearn.graph import IsingParams, SampleSet
from isinglearn.harness import ExperimentConfig, envelope, pool_seeds, run_sweep
from isinglearn.learners import (Statistics, default_eps_gamma, default_tau, ind_learn, pseudo_likelihood,
                                 rlr_learn, thr_learn)
from isinglearn.theory import (bound_lemma1, bound_thm1, bound_thm3, bound_thm4, bound_thm5,
                               hbar_and_theta_tilde, hbar_iteration, tree_incoherence, tree_params,
                               tree_threshold)


@pytest.fixture
def verdict(capsys):
    def report(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return report


def test_criterion_01_fixed_points(verdict):
    t0 = time.perf_counter()
    hbar, theta_tilde = hbar_and_theta_tilde()
    t = math.tanh(hbar)
    residual = abs(hbar * t - (1 - t * t) ** 2)
    h2 = hbar_iteration()
    gap = abs(theta_tilde - math.tanh(h2) / h2)
    dt = time.perf_counter() - t0
    ok = residual < 1e-12 and gap < 1e-12 and dt < 1.0
    verdict(1, ok, f"hbar={hbar:.12f} residual={residual:.1e} theta_tilde={theta_tilde:.12f} "
                   f"solver gap={gap:.1e} time={dt:.3f}s")


def test_criterion_02_threshold_anchor(verdict):
    t0 = time.perf_counter()
    th = tree_threshold(4, 0.0)
    dt = time.perf_counter() - t0
    verdict(2, abs(th - 0.4203) <= 0.005 and dt < 60, f"theta_thr(4)={th:.10f} target 0.4203+-0.005 time={dt:.1f}s")


def test_criterion_03_asymptotic_consistency(verdict):
    t0 = time.perf_counter()
    _, theta_tilde = hbar_and_theta_tilde()
    scaled = {d: d * tree_threshold(d, 0.0) for d in (10, 20, 40)}
    dt = time.perf_counter() - t0
    gaps = {d: abs(v - theta_tilde) for d, v in scaled.items()}
    rel20 = gaps[20] / theta_tilde
    direction = gaps[10] > gaps[20] > gaps[40]
    ok = rel20 <= 0.15 and direction and dt < 300
    shown = " ".join(f"D={d}:{v:.4f}" for d, v in scaled.items())
    verdict(3, ok, f"Delta*theta_thr {shown} vs theta_tilde={theta_tilde:.4f}; rel gap at 20={rel20:.1%} "
                   f"(need <=15%), approaching={direction} time={dt:.1f}s")


def test_criterion_04_tree_vs_oracle(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for delta in (3, 4):
        for theta in (0.2, 0.5, 0.8):
            P = tree_params(delta, 2, theta)
            rep = exact.incoherence_check(P, 0)
            tree = tree_incoherence(delta, theta, 2)
            first_child = min(rep.S)
            i = min(v for v in rep.Sc if P.graph.has_edge(first_child, v))
            k = rep.Sc.index(i)
            worst = max(worst, float(np.max(np.abs(rep.Q_SS - tree.Q_SS))),
                        float(np.max(np.abs(rep.Q_ScS[k] - tree.Q_iS))),
                        abs(rep.incoherence_vector[k] - tree.entry), abs(rep.sigma_min - tree.sigma_min))
    dt = time.perf_counter() - t0
    verdict(4, worst < 1e-9 and dt < 60, f"max abs diff over Delta in (3,4), theta in (0.2,0.5,0.8) = {worst:.2e} "
                                         f"time={dt:.1f}s")


def _tv(P: IsingParams, rows: np.ndarray) -> float:
    _, probs = brute_force_probs(P)
    codes = ((rows > 0).astype(np.int64) * (1 << np.arange(P.p)[::-1])).sum(axis=1)
    emp = np.bincount(codes, minlength=2 ** P.p) / len(rows)
    return 0.5 * float(np.abs(emp - probs).sum())


def test_criterion_05_sampler_fidelity(verdict):
    # p <= 8 keeps the multinomial noise floor of a 10^6-sample TV estimate below 0.01
    graphs = {"cycle6": cycle(6), "path7": path(7), "star4+3": star(4, 3),
              "regular8": random_regular(8, 3, 1), "grid2x4": diluted_grid(2, 4, 0.0)}
    t0 = time.perf_counter()
    tvs = {}
    for k, (name, g) in enumerate(graphs.items()):
        for theta in (0.2, 0.5):
            P = IsingParams.uniform(g, theta)
            cfg = gibbs.SamplerConfig(seed=100 + k, n=1_000_000, thinning_sweeps=3, chains=4)
            tvs[(name, theta)] = _tv(P, gibbs.draw_samples(P, cfg).rows)
    dt = time.perf_counter() - t0
    worst = max(tvs, key=tvs.get)
    verdict(5, tvs[worst] <= 0.01 and dt < 600, f"max TV={tvs[worst]:.4f} at {worst} over 10 cases time={dt:.1f}s")


SUITE = {"edge4": single_edge_graph(4), "path5": path(5), "cycle6": cycle(6), "star3+2": star(3, 2),
         "grid2x3": diluted_grid(2, 3, 0.0), "regular8": random_regular(8, 3, 0),
         "regular10": random_regular(10, 3, 1)}


def _population_suite(learn):
    results = {}
    for name, g in SUITE.items():
        # degree bound; the threshold rule needs Delta > 1
        delta = max(2, max(g.degree(i) for i in range(g.p)))
        st = Statistics.from_params(IsingParams.uniform(g, 0.1))
        results[name] = learn(st, delta).succeeded_against(g)
    return results


def _criterion_6(verdict, label, learn):
    t0 = time.perf_counter()
    res = _population_suite(learn)
    dt = time.perf_counter() - t0
    failed = [k for k, v in res.items() if not v]
    verdict(6, not failed and dt < 300, f"[{label}] exact recovery on {len(res) - len(failed)}/{len(res)} graphs "
                                        f"at theta=0.1 failed={failed} time={dt:.1f}s")


def test_criterion_06_population_thr(verdict):
    _criterion_6(verdict, "Thr, tau=(tanh theta + 1/(2 Delta))/2",
                 lambda st, d: thr_learn(st, default_tau(0.1, d)))


def test_criterion_06_population_ind(verdict):
    _criterion_6(verdict, "Ind, eps=sinh(2 theta)/4, gamma=exp(-4 Delta theta) 2^(-2 Delta)",
                 lambda st, d: ind_learn(st, d, *default_eps_gamma(0.1, d)))


def test_criterion_06_population_rlr(verdict):
    _criterion_6(verdict, "Rlr, lambda=0.01", lambda st, d: rlr_learn(st, 0.01))


PHASE_CONFIG = {
    "graph": {"family": "regular", "params": {"p": 25, "delta": 4}, "seeds": list(range(8))},
    "theta": [0.15, 0.65], "n": [4000], "trials": 1, "master_seed": 2009, "criterion": "per-vertex",
    "learner": {"method": "rlr", "accelerated": True, "lambda": {"rule": "scaled", "lambda0": [0.5, 1, 2, 4]}},
    "sampler": {"thinning_sweeps": 10},
}


@pytest.mark.slow
def test_criterion_07_phase_transition(verdict):
    t0 = time.perf_counter()
    env = envelope(pool_seeds(run_sweep(ExperimentConfig.from_dict(PHASE_CONFIG))))
    dt = time.perf_counter() - t0
    at = {r.theta: r for r in env.rows}
    lo, hi = at[0.15], at[0.65]
    ok = lo.p_succ >= 0.9 and hi.p_succ <= 0.3 and lo.trials == hi.trials == 200 and dt < 7200
    verdict(7, ok, f"P_succ(0.15)={lo.p_succ:.3f} (need >=0.9, best lambda0={lo.lambda0}) "
                   f"P_succ(0.65)={hi.p_succ:.3f} (need <=0.3) vertex-trials={lo.trials} time={dt:.0f}s")


def _fd_hessian(P, r, h=1e-4):
    others = [v for v in range(P.p) if v != r]
    th0 = np.array([P.coupling(r, v) for v in others])
    m = len(others)
    E = np.eye(m) * h
    f = lambda t: exact.population_objective(P, r, t)
    H = np.empty((m, m))
    for a in range(m):
        for b in range(m):
            H[a, b] = (f(th0 + E[a] + E[b]) - f(th0 + E[a] - E[b]) - f(th0 - E[a] + E[b])
                       + f(th0 - E[a] - E[b])) / (4 * h * h)
    return H


def test_criterion_08_gradient_checks(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    grad_err = 0.0
    for _ in range(100):
        p, n = int(rng.integers(2, 9)), int(rng.integers(1, 200))
        s = SampleSet((2 * rng.integers(0, 2, size=(n, p)) - 1).astype(np.int8))
        r = int(rng.integers(p))
        w = rng.normal(scale=0.7, size=p - 1)
        _, g = pseudo_likelihood(w, s, r)
        E = np.eye(p - 1) * 1e-5
        fd = np.array([(pseudo_likelihood(w + e, s, r)[0] - pseudo_likelihood(w - e, s, r)[0]) / 2e-5 for e in E])
        grad_err = max(grad_err, float(np.max(np.abs(g - fd))))
    hess_err = 0.0
    for g, theta in ((path(5), 0.4), (cycle(6), 0.7), (star(3, 2), 0.3), (random_regular(8, 3, 2), 0.5)):
        P = IsingParams.uniform(g, theta)
        for r in range(g.p):
            hess_err = max(hess_err, float(np.max(np.abs(exact.population_hessian(P, r) - _fd_hessian(P, r)))))
    dt = time.perf_counter() - t0
    ok = grad_err < 1e-7 and hess_err < 1e-6 and dt < 60
    verdict(8, ok, f"max gradient err={grad_err:.1e} (100 instances) max Hessian err={hess_err:.1e} time={dt:.1f}s")


# hand-computed values, typed in independently of the package formulas
BOUND_CASES = [
    (bound_thm1, (20, 3, 0.1, 0.05), {"value": 11913.346789404257}),
    (bound_thm1, (100, 4, 0.05, 0.01), {"value": 14069.338759175827}),
    (bound_thm1, (50, 2, 0.2, 0.1), {"value": 19954.828431177375}),
    (bound_thm3, (20, 3, 0.1, 0.05), {"value": 1613644826114824.8, "complexity": 490820775699.0859}),
    (bound_thm3, (100, 4, 0.05, 0.01), {"value": 6.656151086581027e+17, "complexity": 2.357847135225903e+21}),
    (bound_thm3, (50, 2, 0.2, 0.1), {"value": 5167630753142.074, "complexity": 39120230054.281456}),
    (bound_thm4, (20, 3, 0.1, 0.05), {"value": 30219.886796190898, "complexity": 3857655.021521328}),
    (bound_thm4, (100, 4, 0.05, 0.01), {"value": 347230.7385140654, "complexity": 3589032489375.897}),
    (bound_thm4, (50, 2, 0.2, 0.1), {"value": 3894.03092717826, "complexity": 22800.032342941522}),
    (bound_thm5, (20, 3, 0.1, 0.05), {"value": 3319.9915087025424, "lambda": 0.05773502691896258}),
    (bound_thm5, (100, 4, 0.05, 0.01), {"value": 25431.92335943057, "lambda": 0.025}),
    (bound_thm5, (50, 5, 0.2, 0.1), {"value": 1525.7590806912713, "lambda": 0.08944271909999159}),
    (bound_lemma1, (100000, 1, 0.1, 1.0, 1.0), {"value": 0.00018192719447605757}),
    (bound_lemma1, (2000000, 2, 0.05, 0.8, 0.9), {"value": 0.08422136840533785}),
    (bound_lemma1, (300000, 1, 0.02, 0.5, 1.0), {"value": 1.0, "raw": 1.2537803566897736}),
]


def test_criterion_09_bound_calculators(verdict):
    t0 = time.perf_counter()
    bad = []
    for fn, args, want in BOUND_CASES:
        got = fn(*args).to_dict()
        for key, v in want.items():
            if not math.isclose(got[key], v, rel_tol=1e-12):
                bad.append(f"{fn.__name__}{args}.{key}={got[key]!r} want {v!r}")
    dt = time.perf_counter() - t0
    verdict(9, not bad and dt < 1.0, f"{len(BOUND_CASES)} cases, mismatches={bad} time={dt:.3f}s")


def test_criterion_10_cli_determinism(verdict, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = {"graph": {"family": "regular", "params": {"p": 8, "delta": 3}, "seeds": [0, 1]},
           "theta": [0.2, 0.5], "n": [300], "trials": 2, "master_seed": 3,
           "learner": {"method": "rlr", "lambda": {"rule": "scaled", "lambda0": [1.0, 2.0]}}}
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    main(["gen", "regular", "--p", "8", "--delta", "3", "--seed", "4", "--out", "g.json"])
    main(["sample", "--graph", "g.json", "--theta", "0.3", "--n", "1000", "--seed", "7", "--out", "s.txt"])
    commands = [
        "gen grid --rows 3 --cols 4 --rho 0.3 --seed 2 --out {o}",
        "gen regular --p 12 --delta 4 --seed 9 --out {o}",
        "sample --graph g.json --theta 0.4 --n 500 --seed 3 --chains 2 --out {o} --meta {o}.meta",
        "oracle corr --graph g.json --theta 0.3 --out {o}",
        "oracle incoherence --graph g.json --theta 0.6 --vertex 2 --out {o}",
        "learn thr --samples s.txt --tau 0.2 --graph-truth g.json --out {o}",
        "learn indd --samples s.txt --theta 0.3 --delta 3 --out {o}",
        "learn rlr --samples s.txt --lambda0 1.0 --theta 0.3 --out {o}",
        "theory fixed-points --delta 4 --theta 0.6 --out {o}",
        "theory bound thm4 --p 30 --delta 3 --theta 0.1 --format csv --out {o}",
        "sweep --config cfg.json --out {o} --manifest {o}.meta --envelope lambda0",
        "sweep --config cfg.json --out {o} --pool-seeds --workers 2",
    ]
    t0 = time.perf_counter()
    differing = []
    for k, cmd in enumerate(commands):
        blobs = []
        for rep in range(2):
            out = f"out{k}_{rep}"
            assert main(cmd.format(o=out).split()) == 0
            blobs.append(tuple((tmp_path / f).read_bytes() for f in (out, out + ".meta")
                               if (tmp_path / f).exists()))
        if blobs[0] != blobs[1]:
            differing.append(cmd)
    dt = time.perf_counter() - t0
    verdict(10, not differing, f"{len(commands)} commands run twice, differing outputs={differing} time={dt:.1f}s")
