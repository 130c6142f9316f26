"""Command-line interface: ``isinglearn <command> ...``.

Every command writes sorted, indented JSON (or CSV where noted) so that
repeated runs with the same seeds give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any

from isinglearn import exact, gibbs, harness
from isinglearn.generators import make_graph
from isinglearn.graph import IsingParams, graph_from_json, params_from_json, read_samples, write_samples
from isinglearn.learners import (Statistics, default_eps_gamma, default_tau, ind_learn, indd_learn, rlr_learn,
                                 scaled_lambda, thr_learn)
from isinglearn.theory import (bound_lemma1, bound_thm1, bound_thm3, bound_thm4, bound_thm5, boundary_field,
                               converged_incoherence, hbar_and_theta_tilde, tree_threshold)


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _params(args) -> IsingParams:
    return params_from_json(Path(args.graph).read_text(), args.theta)


def cmd_gen(args) -> None:
    kw = {k: getattr(args, k) for k in ("p", "delta", "rows", "cols", "rho", "isolated", "t")
          if getattr(args, k, None) is not None}
    g = make_graph(args.family, args.seed, **kw)
    _emit(g.to_json() + "\n", args.out)


def cmd_sample(args) -> None:
    burn = "auto" if args.burn_in == "auto" else int(args.burn_in)
    cfg = gibbs.SamplerConfig(seed=args.seed, n=args.n, burn_in_sweeps=burn, thinning_sweeps=args.thinning,
                              scan=args.scan, chains=args.chains, mixing_cap=args.mixing_cap)
    s = gibbs.draw_samples(_params(args), cfg)
    if args.out:
        write_samples(s, args.out)
        if args.meta:
            Path(args.meta).write_text(_dump(s.meta))
    else:
        buf = io.StringIO()
        buf.write(f"{s.p} {s.n} {args.seed}\n")
        for row in s.rows:
            buf.write(" ".join(str(int(v)) for v in row) + "\n")
        sys.stdout.write(buf.getvalue())


def cmd_oracle(args) -> None:
    params = _params(args)
    if args.query == "logz":
        out: dict[str, Any] = {"logZ": exact.partition_function(params)}
    elif args.query == "corr":
        out = {"correlations": exact.correlation_matrix(params).tolist(),
               "magnetization": [exact.magnetization(params, i) for i in range(params.p)]}
    elif args.query == "hessian":
        r = _vertex(args)
        out = {"r": r, "index": [v for v in range(params.p) if v != r],
               "hessian": exact.population_hessian(params, r).tolist()}
    else:
        out = exact.incoherence_check(params, _vertex(args)).to_dict()
    out.update(p=params.p, theta=args.theta)
    _emit(_dump(out), args.out)


def _vertex(args) -> int:
    if args.vertex is None:
        raise SystemExit("--vertex is required for this query")
    return args.vertex


def cmd_learn(args) -> None:
    truth = graph_from_json(Path(args.graph_truth).read_text()) if args.graph_truth else None
    if args.samples:
        st = Statistics.from_samples(read_samples(args.samples))
    else:
        if truth is None or args.theta is None:
            raise SystemExit("population mode needs --graph-truth and --theta")
        st = Statistics.from_params(IsingParams.uniform(truth, args.theta))
    delta = args.delta
    if delta is None and truth is not None:
        delta = max((truth.degree(i) for i in range(truth.p)), default=0)

    def need(name: str, value):
        if value is None:
            raise SystemExit(f"--{name} is required (or give --theta and a degree bound)")
        return value

    if args.method == "thr":
        tau = args.tau if args.tau is not None else default_tau(need("theta", args.theta), need("delta", delta))
        res = thr_learn(st, tau)
    elif args.method == "rlr":
        if args.lam is not None:
            lam = args.lam
        else:
            n = need("samples", st.n)
            lam = scaled_lambda(need("lambda0", args.lambda0), need("theta", args.theta), st.p, n)
        res = rlr_learn(st, lam, accelerated=args.accelerated)
    else:
        d = need("delta", delta)
        if args.eps is None or args.gamma is None:
            e0, g0 = default_eps_gamma(need("theta", args.theta), d)
        eps = args.eps if args.eps is not None else e0
        gamma = args.gamma if args.gamma is not None else g0
        if args.method == "ind":
            res = ind_learn(st, d, eps, gamma)
        else:
            kappa = args.kappa if args.kappa is not None else math.tanh(need("theta", args.theta))
            res = indd_learn(st, d, eps, gamma, kappa)
    _emit(_dump(res.to_dict(truth)), args.out)


def _rows_to_csv(rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    keys = sorted({k for r in rows for k in r})
    w = csv.DictWriter(buf, keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    return buf.getvalue()


def _report(obj: dict[str, Any], args) -> None:
    if args.format == "csv":
        flat = {k: v for k, v in obj.items() if k != "inputs"}
        flat.update({f"input_{k}": v for k, v in obj.get("inputs", {}).items()})
        _emit(_rows_to_csv([flat]), args.out)
    else:
        _emit(_dump(obj), args.out)


def cmd_theory(args) -> None:
    if args.what == "threshold":
        th = tree_threshold(args.delta, args.eps)
        ci = converged_incoherence(args.delta, th)
        obj = {"delta": args.delta, "eps": args.eps, "theta_thr": th, "delta_times_theta_thr": args.delta * th,
               "max_entry_at_threshold": ci.max_entry, "converged": ci.converged}
    elif args.what == "fixed-points":
        hbar, tt = hbar_and_theta_tilde()
        obj = {"delta": args.delta, "theta": args.theta, "h_star": boundary_field(args.delta, args.theta),
               "hbar": hbar, "theta_tilde": tt}
    else:
        obj = _bound(args).to_dict()
    _report(obj, args)


def _bound(args):
    needed = ("n", "lam", "eps_violation", "c_min") if args.which == "lemma1" else ("p", "theta")
    missing = [k for k in needed if getattr(args, k) is None]
    if missing:
        flags = ("--" + {"lam": "lambda"}.get(k, k).replace("_", "-") for k in missing)
        raise SystemExit(f"bound {args.which} needs " + ", ".join(flags))
    if args.which == "lemma1":
        return bound_lemma1(args.n, args.delta, args.lam, args.eps_violation, args.c_min)
    common = (args.p, args.delta, args.theta, args.confidence)
    if args.which == "thm1":
        return bound_thm1(*common)
    if args.which == "thm3":
        return bound_thm3(*common, K=args.K)
    if args.which == "thm4":
        return bound_thm4(*common, alpha=args.alpha, K_prime=args.K_prime, K=args.K)
    return bound_thm5(*common, K2=args.K2, K3=args.K3, K1=args.K1)


def cmd_sweep(args) -> None:
    cfg = harness.ExperimentConfig.from_json(Path(args.config).read_text())
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    res = harness.run_sweep(cfg)
    if args.pool_seeds:
        res = harness.pool_seeds(res)
    if args.envelope:
        res = harness.envelope(res, args.envelope)
    harness.emit_csv(res, args.out)
    if args.manifest:
        harness.write_manifest(res, args.manifest)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isinglearn", description="Ising structure-learning workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph as JSON")
    g.add_argument("family", choices=["regular", "grid", "star", "edge", "tree"])
    g.add_argument("--p", type=int)
    g.add_argument("--delta", type=int)
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--rho", type=float)
    g.add_argument("--isolated", type=int)
    g.add_argument("--t", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sample", help="draw Glauber samples")
    s.add_argument("--graph", required=True)
    s.add_argument("--theta", type=float)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--burn-in", default="auto")
    s.add_argument("--thinning", type=int, default=1)
    s.add_argument("--scan", choices=["random", "sequential"], default="random")
    s.add_argument("--chains", type=int, default=1)
    s.add_argument("--mixing-cap", type=int, default=gibbs.DEFAULT_MIXING_CAP)
    s.add_argument("--out")
    s.add_argument("--meta", help="write sampler metadata JSON here")
    s.set_defaults(func=cmd_sample)

    o = sub.add_parser("oracle", help="exact enumeration queries")
    o.add_argument("query", choices=["logz", "corr", "hessian", "incoherence"])
    o.add_argument("--graph", required=True)
    o.add_argument("--theta", type=float)
    o.add_argument("--vertex", type=int)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    le = sub.add_parser("learn", help="structure learning")
    le.add_argument("method", choices=["thr", "ind", "indd", "rlr"])
    le.add_argument("--samples", help="sample file; omit for population statistics")
    le.add_argument("--graph-truth")
    le.add_argument("--theta", type=float)
    le.add_argument("--delta", type=int)
    le.add_argument("--tau", type=float)
    le.add_argument("--eps", type=float)
    le.add_argument("--gamma", type=float)
    le.add_argument("--kappa", type=float)
    le.add_argument("--lambda", dest="lam", type=float)
    le.add_argument("--lambda0", type=float)
    le.add_argument("--accelerated", action="store_true")
    le.add_argument("--out")
    le.set_defaults(func=cmd_learn)

    th = sub.add_parser("theory", help="fixed points, tree threshold and bounds")
    tsub = th.add_subparsers(dest="what", required=True)
    t1 = tsub.add_parser("threshold")
    t1.add_argument("--delta", type=int, required=True)
    t1.add_argument("--eps", type=float, default=0.0)
    t2 = tsub.add_parser("fixed-points")
    t2.add_argument("--delta", type=int, required=True)
    t2.add_argument("--theta", type=float, required=True)
    t3 = tsub.add_parser("bound")
    t3.add_argument("which", choices=["thm1", "thm3", "thm4", "thm5", "lemma1"])
    t3.add_argument("--p", type=int)
    t3.add_argument("--delta", type=int, required=True)
    t3.add_argument("--theta", type=float)
    t3.add_argument("--confidence", type=float, default=0.05, help="failure probability delta")
    t3.add_argument("--K", type=float, default=1.0)
    t3.add_argument("--K-prime", dest="K_prime", type=float, default=1.0)
    t3.add_argument("--K1", type=float, default=1.0)
    t3.add_argument("--K2", type=float, default=1.0)
    t3.add_argument("--K3", type=float, default=1.0)
    t3.add_argument("--alpha", type=float, default=1.0)
    t3.add_argument("--n", type=int)
    t3.add_argument("--lambda", dest="lam", type=float)
    t3.add_argument("--eps-violation", type=float)
    t3.add_argument("--c-min", type=float)
    for t in (t1, t2, t3):
        t.add_argument("--format", choices=["json", "csv"], default="json")
        t.add_argument("--out")
    th.set_defaults(func=cmd_theory)

    sw = sub.add_parser("sweep", help="run a success-probability sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", required=True)
    sw.add_argument("--manifest")
    sw.add_argument("--pool-seeds", action="store_true")
    sw.add_argument("--envelope", choices=list(harness.ENVELOPE_PARAMS))
    sw.add_argument("--workers", type=int)
    sw.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
