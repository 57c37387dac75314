"""Command-line interface.

Subcommands:

* ``flow``      integrate the coflow ODE; writes <out>.csv, <out>.json and
                optionally <out>.png.
* ``verify``    run a verification suite (algebra | g2 | torus | ode | all);
                writes a JSON report, optionally a residual chart.
* ``classify``  print the regime row for (epsilon, A), or re-derive the
                verdicts from a previously written trajectory CSV.
* ``sweep``     classify a grid of (A, epsilon) values; JSON array output,
                optionally a regime scatter figure.

Exit codes: 0 success, 1 check failure, 2 usage/configuration error.
Worker count for sweeps honors the G2COFLOW_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import ode
from .config import ConfigError, load_config
from .suites import run_suite

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2


def worker_count():
    env = os.environ.get("G2COFLOW_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"G2COFLOW_WORKERS must be an integer, got {env!r}")
    return 1


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------

def cmd_flow(args):
    cfg = load_config(args.config, {
        "epsilon": args.epsilon, "A": args.A, "c0": args.c0,
        "rm0_sq": args.rm0_sq, "t_end": args.t_end, "tol": args.tol,
        "output_path": args.output,
    })
    params = ode.AnsatzParams(
        epsilon=cfg["epsilon"], A=cfg["A"], c0=cfg["c0"], rm0_sq=cfg["rm0_sq"]
    )
    traj = ode.integrate(params, t_end=cfg["t_end"], tol=cfg["tol"])
    regime = ode.classify_regime(params)
    T = regime.T_max
    if traj.termination == "blow-up":
        T = ode.extrapolate_blowup(traj)
    sing = ode.classify_singularity(traj, params, T_max=T)

    out = cfg["output_path"]
    csv_path = out + ".csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "a", "b", "lambda", "T_minus_t_times_lambda"])
        for t, b in zip(traj.times, traj.bs):
            st = ode.AnsatzState(t=t, b=b)
            lam = ode.lambda_t(st, params)
            gap = (T - t) * lam if math.isfinite(T) else math.inf
            w.writerow([repr(t), repr(ode.state_a(st, params)), repr(b),
                        repr(lam), repr(gap)])

    summary = {
        "params": {"epsilon": params.epsilon, "A": params.A,
                   "c0": params.c0, "rm0_sq": params.rm0_sq},
        "t_end": cfg["t_end"],
        "termination": traj.termination,
        "n_accepted": traj.n_accepted,
        "n_rejected": traj.n_rejected,
        "regime": regime.to_dict(),
        "condition": regime.condition,
        "outcome": regime.outcome,
        "T_max": T,
        "singularity_type": sing.type,
        "sup_T_minus_t_lambda": sing.sup_quantity,
        "final_b": traj.final_b,
        "volume_trend": _trend(traj.volume_series()),
    }
    _write_json(out + ".json", summary)
    print(f"wrote {csv_path} and {out}.json "
          f"(regime {regime.condition}, outcome {regime.outcome}, type {sing.type})")
    if args.plot:
        from .plots import flow_figure

        fig = flow_figure(traj, params, summary, out + ".png")
        print(f"wrote {fig}")
    return EXIT_OK


def _trend(series):
    diffs = [b - a for a, b in zip(series, series[1:])]
    if all(abs(d) < 1e-14 for d in diffs):
        return "constant"
    if all(d <= 1e-14 for d in diffs):
        return "decreasing"
    if all(d >= -1e-14 for d in diffs):
        return "increasing"
    return "mixed"


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args):
    cfg = load_config(args.config, {
        "grid_n": args.grid_n, "modes": args.modes,
        "amplitude": args.amplitude, "seed": args.seed,
        "output_path": args.output,
    })
    kwargs = {}
    if args.suite in ("torus", "all"):
        kwargs = {
            "grid_n": cfg["grid_n"],
            "amplitude": cfg["amplitude"],
            "modes": cfg["modes"],
            "seed": cfg["seed"],
        }
    try:
        results = run_suite(args.suite, **kwargs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    width = max(len(r.check_id) for r in results)
    for r in results:
        mark = "PASS" if r.status == "pass" else "FAIL"
        print(f"[{mark}] {r.check_id:<{width}}  residual {r.residual:9.3e}  "
              f"tol {r.tolerance:g}  {r.statement}")
    n_fail = sum(1 for r in results if r.status != "pass")
    print(f"{len(results) - n_fail}/{len(results)} checks passed")

    report = {
        "suite": args.suite,
        "seed": cfg["seed"],
        "checks": [r.to_dict() for r in results],
        "n_failed": n_fail,
    }
    out = cfg["output_path"]
    _write_json(out + ".report.json", report)
    print(f"wrote {out}.report.json")
    if args.plot:
        from .plots import verify_figure

        fig = verify_figure(results, out + ".report.png")
        print(f"wrote {fig}")
    return EXIT_OK if n_fail == 0 else EXIT_CHECK_FAILURE


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def cmd_classify(args):
    if args.from_csv:
        return _classify_from_csv(args)
    if args.epsilon is None or args.epsilon <= 0:
        print("error: epsilon must be positive", file=sys.stderr)
        return EXIT_USAGE
    params = ode.AnsatzParams(epsilon=args.epsilon, A=args.A)
    rep = ode.classify_regime(params)
    print(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _classify_from_csv(args):
    csv_path = args.from_csv
    sidecar = os.path.splitext(csv_path)[0] + ".json"
    if args.epsilon is not None and args.A is not None:
        eps, A = args.epsilon, args.A
    elif os.path.exists(sidecar):
        with open(sidecar) as fh:
            summary = json.load(fh)
        eps = summary["params"]["epsilon"]
        A = summary["params"]["A"]
    else:
        print("error: provide --epsilon/--A or keep the summary JSON next to the CSV",
              file=sys.stderr)
        return EXIT_USAGE
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    if len(rows) < 2:
        print("error: trajectory CSV has too few rows", file=sys.stderr)
        return EXIT_USAGE
    bs = [float(r["b"]) for r in rows]
    trend = _trend(bs)
    params = ode.AnsatzParams(epsilon=eps, A=A)
    rep = ode.classify_regime(params)
    agree = trend == rep.monotonicity
    out = {
        "params": {"epsilon": eps, "A": A},
        "csv_monotonicity": trend,
        "analytic": rep.to_dict(),
        "verdicts_agree": agree,
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK if agree else EXIT_CHECK_FAILURE


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _sweep_one(item):
    eps, A, t_end = item
    params = ode.AnsatzParams(epsilon=eps, A=A)
    regime = ode.classify_regime(params)
    T = regime.T_max
    traj = ode.integrate(params, t_end=min(t_end, 2.0 * T) if math.isfinite(T) else t_end)
    if traj.termination == "blow-up":
        T = ode.extrapolate_blowup(traj)
    sing = ode.classify_singularity(traj, params, T_max=T)
    return {
        "params": {"epsilon": eps, "A": A},
        "regime": regime.to_dict(),
        "T_max": T,
        "type": sing.type,
    }


def cmd_sweep(args):
    eps_values = [float(x) for x in args.epsilon.split(",")]
    a_values = [float(x) for x in args.A.split(",")]
    if any(e <= 0 for e in eps_values):
        print("error: epsilon values must be positive", file=sys.stderr)
        return EXIT_USAGE
    items = [(e, a, args.t_end) for e in eps_values for a in a_values]
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_one, items))
    else:
        rows = [_sweep_one(it) for it in items]
    _write_json(args.output + ".json", rows)
    print(f"wrote {args.output}.json ({len(rows)} rows, {workers} workers)")
    if args.plot:
        from .plots import sweep_figure

        fig = sweep_figure(rows, args.output + ".png")
        print(f"wrote {fig}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="g2coflow",
        description="Laplacian-coflow calculus on contact Calabi-Yau 7-manifolds: "
        "exact identity suites, spectral torus verification, and the Ansatz flow engine.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("flow", help="integrate the coflow ODE and export the trajectory")
    f.add_argument("--config", help="JSON config file (validated against the shipped schema)")
    f.add_argument("--epsilon", type=float)
    f.add_argument("--A", type=float)
    f.add_argument("--c0", type=float)
    f.add_argument("--rm0-sq", dest="rm0_sq", type=float)
    f.add_argument("--t-end", dest="t_end", type=float)
    f.add_argument("--tol", type=float)
    f.add_argument("--output", "-o", default=None)
    f.add_argument("--plot", action="store_true", help="render the trajectory figure")
    f.set_defaults(fn=cmd_flow)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=["algebra", "g2", "torus", "ode", "all"])
    v.add_argument("--config")
    v.add_argument("--grid-n", dest="grid_n", type=int)
    v.add_argument("--modes", type=int)
    v.add_argument("--amplitude", type=float)
    v.add_argument("--seed", type=int)
    v.add_argument("--output", "-o", default=None)
    v.add_argument("--plot", action="store_true", help="render the residual chart")
    v.set_defaults(fn=cmd_verify)

    c = sub.add_parser("classify", help="regime classification for (epsilon, A)")
    c.add_argument("--epsilon", type=float)
    c.add_argument("--A", type=float, default=0.0)
    c.add_argument("--from-csv", help="re-derive verdicts from a flow CSV")
    c.set_defaults(fn=cmd_classify)

    s = sub.add_parser("sweep", help="classify a grid of (A, epsilon) values")
    s.add_argument("--epsilon", default="0.5,1,2", help="comma-separated values")
    s.add_argument("--A", default="-1,0,0.5,1,2", help="comma-separated values")
    s.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    s.add_argument("--output", "-o", default="sweep")
    s.add_argument("--plot", action="store_true")
    s.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
