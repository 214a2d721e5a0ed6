"""Command-line interface: ``linkrate {rate,bounds,sweep,simulate,validate}``.

Exit codes: 0 ok, 2 usage or parameter domain, 3 no convergence within the
j cap, 4 I/O failure, 5 a validation check failed.
"""
from __future__ import annotations

import argparse
import itertools
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ParameterError
from .link import LinkParams, link_entropy
from .overhead import DEFAULT_TOL, bounds, entropy_rate
from .records import RunRecord, write_csv

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_IO, EXIT_VALIDATION = 0, 2, 3, 4, 5

BOUNDS_HEADER = ["j", "L", "U", "gap", "r", "p"]
SWEEP_HEADER = [
    "u", "d", "U", "D", "entropy_rate", "half_width", "j_used", "converged", "gap_1", "first_order",
]


class UsageError(Exception):
    pass


def parse_axis(spec: str) -> list:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list of values."""
    try:
        if ":" in spec:
            start, stop, num = spec.split(":")
            n = int(num)
            if n < 1:
                raise ValueError
            return [float(v) for v in np.linspace(float(start), float(stop), n)]
        vals = [float(v) for v in spec.split(",") if v.strip()]
        if not vals:
            raise ValueError
        return vals
    except ValueError:
        raise UsageError(f"malformed grid axis {spec!r}; use start:stop:num or v1,v2,...") from None


def _params(args) -> LinkParams:
    return LinkParams(args.u, args.d, args.base)


def _emit(record: RunRecord, args):
    text = record.to_json()
    print(text)
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            fh.write(text + "\n")


def cmd_rate(args) -> int:
    p = _params(args)
    est = entropy_rate(p, args.halfwidth, args.jcap, args.tol)
    _emit(
        RunRecord(
            "rate",
            {"u": p.u, "d": p.d, "base": p.entropy_base},
            {"halfwidth": args.halfwidth, "jcap": args.jcap, "tol": args.tol},
            {
                "entropy_rate": est.value,
                "half_width": est.half_width,
                "j_used": est.j_used,
                "converged": est.converged,
            },
        ),
        args,
    )
    return EXIT_OK if est.converged else EXIT_NONCONVERGED


def cmd_bounds(args) -> int:
    p = _params(args)
    b = bounds(p, args.jmax, args.tol)
    table = {
        "j": b.j.tolist(),
        "L": b.L.tolist(),
        "U": b.Ub.tolist(),
        "gap": b.gap.tolist(),
        "r": b.table.r.tolist(),
        "p": b.table.p[1:].tolist(),
    }
    if args.csv:
        write_csv(args.csv, BOUNDS_HEADER, zip(*(table[h] for h in BOUNDS_HEADER)))
    _emit(
        RunRecord(
            "bounds",
            {"u": p.u, "d": p.d, "base": p.entropy_base},
            {"jmax": args.jmax, "tol": args.tol},
            table,
        ),
        args,
    )
    return EXIT_OK


def _sweep_row(u, d, args):
    p = LinkParams(u, d, args.base)
    est = entropy_rate(p, args.halfwidth, args.jcap, args.tol)
    gap1 = float(bounds(p, 1, args.tol).gap[0])
    return [p.u, p.d, p.U, p.D, est.value, est.half_width, est.j_used, est.converged, gap1,
            link_entropy(p) / p.D]


def cmd_sweep(args) -> int:
    us, ds = parse_axis(args.u_grid), parse_axis(args.d_grid)
    points = list(itertools.product(us, ds))
    for u, d in points:
        LinkParams(u, d)
    from .simulate import worker_count

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = list(pool.map(lambda ud: _sweep_row(ud[0], ud[1], args), points))
    write_csv(args.out, SWEEP_HEADER, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .simulate import (SimConfig, empirical_pj, plugin_conditional_entropy,
                           simulate_m_trace, write_trace)

    p = _params(args)
    cfg = SimConfig(p, horizon=args.steps + args.burn_in, depth=args.depth,
                    replicas=args.replicas, seed=args.seed, burn_in=args.burn_in)
    tr = simulate_m_trace(cfg)
    b = bounds(p, max(args.j, 1), args.tol)
    pj = [empirical_pj(tr, k) for k in range(1, args.j + 1)]
    out = {
        "depth": cfg.depth,
        "samples": int(sum(len(m) for m in tr.traces)),
        "mean_M": float(tr.pooled().mean()),
        "pmf": tr.pmf().tolist(),
        "p_empirical": [e.value for e in pj],
        "p_stderr": [e.stderr for e in pj],
        "p_analytic": b.table.p[1 : args.j + 1].tolist(),
    }
    if args.j <= 5:
        h = plugin_conditional_entropy(tr, args.j, miller_madow=args.miller_madow)
        out.update(
            plugin_entropy=h.value,
            plugin_stderr=h.stderr,
            plugin_bias_bound=h.bias_bound,
            undersampled=h.undersampled,
            L=float(b.L[args.j - 1]),
            U=float(b.Ub[args.j - 1]),
        )
    if args.trace_out:
        write_trace(tr.traces[0], args.trace_out, args.trace_format)
    _emit(
        RunRecord(
            "simulate",
            {"u": p.u, "d": p.d, "base": p.entropy_base},
            {"steps": args.steps, "seed": args.seed, "j": args.j, "replicas": args.replicas,
             "depth": cfg.depth, "burn_in": args.burn_in},
            out,
        ),
        args,
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_checks

    checks = run_checks(args.level, tol=args.tol, seed=args.seed, steps=args.steps)
    for c in checks:
        print(c.line())
    if args.json:
        rec = RunRecord(
            "validate", {}, {"level": args.level, "tol": args.tol, "seed": args.seed},
            {c.name: {"passed": c.passed, "measured": c.measured, "tolerance": c.tolerance,
                      "detail": c.detail} for c in checks},
        )
        with open(args.json, "w") as fh:
            fh.write(rec.to_json() + "\n")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkrate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def link_args(sp, with_ud=True):
        if with_ud:
            sp.add_argument("--u", type=float, required=True, help="closed->open probability")
            sp.add_argument("--d", type=float, required=True, help="open->closed probability")
        sp.add_argument("--base", choices=("bits", "nats"), default="bits")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="truncation tolerance of the level series")

    sp = sub.add_parser("rate", help="bracket the message entropy rate")
    link_args(sp)
    sp.add_argument("--halfwidth", type=float, default=1e-10)
    sp.add_argument("--jcap", type=int, default=1000)
    sp.add_argument("--json", help="also write the record here")
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("bounds", help="table of L_j, U_j, gaps, r_j, p_j")
    link_args(sp)
    sp.add_argument("--jmax", type=int, default=20)
    sp.add_argument("--csv", help="write the table as CSV")
    sp.add_argument("--json", help="also write the record here")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("sweep", help="entropy rate over a (u, d) grid")
    link_args(sp, with_ud=False)
    sp.add_argument("--u-grid", required=True, help="start:stop:num or v1,v2,...")
    sp.add_argument("--d-grid", required=True, help="start:stop:num or v1,v2,...")
    sp.add_argument("--halfwidth", type=float, default=1e-10)
    sp.add_argument("--jcap", type=int, default=1000)
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("simulate", help="Monte Carlo message trace and estimates")
    link_args(sp)
    sp.add_argument("--steps", type=int, default=10**6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--j", type=int, default=3)
    sp.add_argument("--replicas", type=int, default=1)
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--burn-in", type=int, default=100)
    sp.add_argument("--miller-madow", action="store_true")
    sp.add_argument("--trace-out", help="write replica 0's trace here")
    sp.add_argument("--trace-format", choices=("binary", "csv"), default="binary")
    sp.add_argument("--json", help="also write the record here")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("validate", help="run the cross-check battery")
    sp.add_argument("--level", choices=("fast", "full"), default="fast")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--seed", type=int, default=2026)
    sp.add_argument("--steps", type=int, default=10**7)
    sp.add_argument("--json", help="write the report here")
    sp.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, UsageError) as exc:
        print(f"linkrate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"linkrate: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
