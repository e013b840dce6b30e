"""Command line interface: `hslg simulate | experiment | verify`."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import EXPERIMENT_DEFAULTS, load_config, print_defaults
from .experiments import Result, run_experiment
from .rng import replica_stream


def _simulate(args) -> int:
    from .. import ensemble as ens_mod
    from .. import gibbs as gibbs_mod
    from .. import polymer as poly_mod
    from .. import walks as walks_mod
    from ..specfun import digamma

    rng = replica_stream(args.seed, "simulate", 0)
    theta, alpha, N = args.theta, args.alpha, args.n
    prov = {
        "command": "simulate", "model": args.model, "n": N,
        "theta": theta, "alpha": alpha, "seed": args.seed,
    }
    if args.model == "polymer":
        params = poly_mod.PolymerParams(theta=theta, alpha=alpha)
        row = poly_mod.rolling_antidiag_logZ(N, params, rng, full_line=True)
        center = 2.0 * N * digamma(theta)
        res = Result(
            name="simulate-polymer", provenance=prov,
            columns=["j", "logZ", "F"],
            rows=[(j, float(row[j]),
                   float((row[j] + center) / N ** (1.0 / 3.0)))
                  for j in range(N)],
        )
    elif args.model == "ensemble":
        params = poly_mod.PolymerParams(theta=theta, alpha=alpha)
        fld = poly_mod.gen_weights(N, params, args.seed)
        sym = ens_mod.symmetrize(fld)
        le = ens_mod.build_line_ensemble(sym, N, theta,
                                         depth=min(3, N), nan_on_cancel=True)
        rows = []
        for i in range(1, le.depth + 1):
            for j in range(1, 2 * N - 2 * i + 2 + 1):
                rows.append((i, j, le.value(i, j)))
        res = Result(name="simulate-ensemble", provenance=prov,
                     columns=["curve", "j", "value"], rows=rows)
    elif args.model == "gibbs":
        T = max(2, N)
        dom = gibbs_mod.domain_kkt(2, T, y=[0.0, 0.0], z=[0.0] * T,
                                   alpha=alpha, theta=theta)
        spec = gibbs_mod.GibbsSpec(dom)
        st = spec.new_state()
        gibbs_mod.heat_bath_sweep(spec, st, rng, n_sweeps=1000)
        rows = [(v[0], v[1], st.value(v)) for v in sorted(dom.vertices)]
        res = Result(name="simulate-gibbs", provenance=prov,
                     columns=["i", "j", "value"], rows=rows)
    elif args.model == "walks":
        smp = walks_mod.prw_sample(max(3, N), 0.0, -float(np.sqrt(N)),
                                   max(alpha, 0.1), theta, rng)
        prov["log_wsc"] = smp.log_wsc
        res = Result(name="simulate-walks", provenance=prov,
                     columns=["k", "s1", "s2"],
                     rows=[(k + 1, float(smp.s1[k]), float(smp.s2[k]))
                           for k in range(len(smp.s1))])
    else:
        raise SystemExit(f"unknown model {args.model}")
    res.write_csv(args.out, json_mirror=args.json)
    return 0


def _experiment(args) -> int:
    if args.print_defaults:
        print(print_defaults(args.name))
        return 0
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    cfg = load_config(args.name, path=args.config, overrides=overrides)
    res = run_experiment(cfg)
    res.write_csv(args.out, json_mirror=args.json)
    if args.out != "-":
        print(f"wrote {args.out}")
        for k, v in res.summary.items():
            print(f"  {k}: {v}")
    return 0


def _verify(args) -> int:
    from ..verify import run_criteria

    ok = run_criteria(selected=args.criteria, seed=args.seed)
    return 0 if ok else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="hslg",
        description="Half-space log-gamma polymer simulations and checks",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="draw one object and write it as CSV")
    sim.add_argument("--model", required=True,
                     choices=["polymer", "ensemble", "gibbs", "walks"])
    sim.add_argument("--n", type=int, default=64)
    sim.add_argument("--theta", type=float, default=1.0)
    sim.add_argument("--alpha", type=float, default=1.0)
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--out", default="-")
    sim.add_argument("--json", action="store_true",
                     help="also write a JSON mirror next to the CSV")
    sim.set_defaults(func=_simulate)

    exp = sub.add_parser("experiment", help="run a named campaign")
    exp.add_argument("name", choices=sorted(EXPERIMENT_DEFAULTS))
    exp.add_argument("--config", default=None,
                     help="key = value file with one section per experiment")
    exp.add_argument("--print-defaults", action="store_true")
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--threads", type=int, default=None)
    exp.add_argument("--out", default="-")
    exp.add_argument("--json", action="store_true")
    exp.set_defaults(func=_experiment)

    ver = sub.add_parser("verify", help="run the acceptance suite")
    ver.add_argument("--criteria", default=None,
                     help="comma-separated criterion numbers (default: all)")
    ver.add_argument("--seed", type=int, default=1)
    ver.set_defaults(func=_verify)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
