"""Command-line entry point: ``equivox <subcommand> ...``.

Exit codes: 0 on success, 1 when a proven statement is violated, 2 on bad
input or configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import erasure as er
from . import quantum as qm
from . import spinalign as sa
from .io import FormatError, read_joint, read_spec, read_state, write_rows
from .prob import InvalidDistribution
from .search import KINDS, SearchConfig, run_search, worker_count
from .walk import PreconditionViolated, bound_conditional, check_trace, verify_bound, walk


class UsageError(Exception):
    pass


def _emit(rows, args, stream=None, header=True):
    write_rows(rows, args.format, stream or sys.stdout, header=header)


def cmd_bound(args) -> int:
    if args.quantum:
        if args.d is None:
            raise UsageError("--quantum needs --d")
        fn = qm.wilde_bound if args.quantum == "wilde" else qm.winter_bound
        value = fn(args.eps, args.d)
    else:
        if args.dx is None:
            raise UsageError("classical bound needs --dx")
        if args.dx < 2:
            raise UsageError("--dx must be at least 2")
        if not 0.0 <= args.eps <= 1.0:
            raise UsageError("--eps must lie in [0, 1]")
        value = bound_conditional(args.eps, args.dx)
    _emit([{"epsilon": args.eps, "bound": value}], args, header=args.header)
    return 0


def cmd_walk(args) -> int:
    p = read_joint(args.p, exact=args.exact)
    q = read_joint(args.q, exact=args.exact)
    if p.shape != q.shape:
        raise UsageError(f"shape mismatch {p.shape} vs {q.shape}")
    trace = walk(p, q)
    if args.trace:
        with open(args.trace, "w") as fh:
            for rec in trace.records():
                fh.write(json.dumps(rec) + "\n")
    _emit([verify_bound(p, q).row()], args)
    problem = check_trace(trace)
    if problem:
        print(f"walk invariant violated: {problem}", file=sys.stderr)
        return 1
    return 0


def cmd_search(args) -> int:
    spec = read_spec(args.spec) if args.spec else None
    dA = args.dA if args.d is None else args.d
    dB = args.dB if args.d is None else args.d
    cfg = SearchConfig(
        args.kind, args.trials, args.seed, args.tolerance,
        dx=args.dx, dy=args.dy, dA=dA, dB=dB, spec=spec, m=args.m, top=args.top,
    )
    result = run_search(cfg, worker_count())
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_rows(result.rows, args.format, fh)
    else:
        _emit(result.rows, args)
    summary = result.summary()
    note = "" if summary["proven"] else " (conjecture: reported only)"
    print(
        f"{cfg.kind}: {summary['trials']} trials, seed {cfg.seed}, "
        f"{summary['violations']} violations, min slack {summary['min_slack']:.6g}{note}",
        file=sys.stderr,
    )
    return 1 if result.failed else 0


def _parse_pair(text):
    try:
        r1, r2, c, d = text.split(",")
        return int(r1), int(r2), float(c), int(d)
    except ValueError as err:
        raise UsageError(f"--pair expects r1,r2,c,d, got {text!r}") from err


def cmd_spinalign(args) -> int:
    if args.pair:
        r1, r2, c, d = _parse_pair(args.pair)
        rep = sa.check_projector_dominance(r1, r2, c, d, args.trials, args.seed)
        _emit([{"r1": r1, "r2": r2, "c": c, "d": d, "samples": rep.samples,
                "violations": rep.violations, "overlap": rep.overlap}], args)
        return 1 if rep.violations else 0
    if not args.spec:
        raise UsageError("spinalign needs --spec or --pair")
    spec = read_spec(args.spec)
    if args.mode == "optimum":
        w = np.sort(np.clip(np.linalg.eigvalsh(sa.conjectured_optimum(spec)), 0, None))[::-1]
        _emit([{"index": k, "eigenvalue": float(x)} for k, x in enumerate(w)], args)
        return 0
    if args.mode == "classical":
        rep = sa.classical_exhaustive_check(spec)
        _emit([{"assignments": rep.assignments, "violations": rep.violations, "min_slack": rep.min_slack}], args)
        return 1 if rep.violations else 0
    if args.mode == "schatten":
        rep = sa.check_schatten_conjecture(spec, args.m, args.trials, args.seed)
        _emit([{"m": rep.m, "trials": rep.trials, "violations": rep.violations,
                "max_ratio": rep.max_ratio, "optimum_norm": rep.optimum_norm}], args)
        return 1 if rep.violations else 0
    subsets = list(spec.mu)
    rep = sa.check_overlap(spec, subsets, args.trials, args.seed)
    _emit([{"trials": rep.trials, "violations": rep.violations, "max_ratio": rep.max_ratio}], args)
    return 1 if rep.violations else 0


def _grid(lo, hi, steps):
    if steps < 1:
        raise UsageError("--steps must be positive")
    return [lo + (hi - lo) * k / steps for k in range(steps + 1)]


def cmd_erasure(args) -> int:
    t = args.table
    if t == "q4":
        rows = []
        for q in _grid(0.0, 1.0, args.steps):
            s = er.q4(q)
            rows.append({"q": q, "q4": s, "improvement": q - s})
    elif t == "ekr":
        rows = [{"n": n, "q": args.q, "bound": er.ekr_recovery_bound(n, args.q)} for n in range(1, args.nmax + 1)]
    elif t == "r4":
        rows = [{"q": q, "r4": er.r4_bound(q), "one_minus_q": 1.0 - q} for q in _grid(0.0, 1.0, args.steps)]
    elif t == "capacity":
        rows = [{"q": q, "capacity": er.erasure_capacity(q, args.d)} for q in _grid(0.0, 1.0, args.steps)]
    else:
        rows = [{"threshold": er.improvement_threshold()}]
    _emit(rows, args)
    return 0


def cmd_quantum_demo(args) -> int:
    if args.state:
        rho = read_state(args.state)
        h_ab = qm.von_neumann_entropy(rho)
        h_b = qm.von_neumann_entropy(rho.reduced("B"))
        _emit([{"H_AB": h_ab, "H_B": h_b, "H_A_given_B": h_ab - h_b}], args)
        return 0
    d = args.d
    top = 1.0 - 1.0 / d**2
    rows = []
    for eps in _grid(0.0, top, args.steps):
        eps = min(eps, top)
        phi, iso = qm.isotropic_pair(d, eps)
        gap = abs(qm.conditional_vn_entropy(phi) - qm.conditional_vn_entropy(iso))
        rows.append({"epsilon": eps, "gap": gap, "wilde": qm.wilde_bound(eps, d), "winter": qm.winter_bound(eps, d)})
    _emit(rows, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equivox", description="Uniform continuity bounds for equivocation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=fn)
        return p

    p = add("bound", cmd_bound, "evaluate a continuity bound")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--dx", type=int)
    p.add_argument("--quantum", choices=("wilde", "winter"))
    p.add_argument("--d", type=int)
    p.add_argument("--header", action="store_true", help="print a header line")

    p = add("walk", cmd_walk, "walk a pair of joint distributions and check the invariants")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--trace", help="write snapshots as JSON lines")
    p.add_argument("--exact", action="store_true", help="use rational arithmetic")

    p = add("search", cmd_search, "seeded random search for bound violations")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--dx", type=int, default=3)
    p.add_argument("--dy", type=int, default=3)
    p.add_argument("--dA", type=int, default=2)
    p.add_argument("--dB", type=int, default=2)
    p.add_argument("--d", type=int, help="shorthand for --dA D --dB D")
    p.add_argument("--spec", help="alignment spec JSON (schatten, overlap)")
    p.add_argument("--m", type=int, default=2, help="Schatten order")
    p.add_argument("--top", type=int, default=20, help="rows kept in the report")
    p.add_argument("--out", help="report path (default stdout)")

    p = add("spinalign", cmd_spinalign, "spin alignment checks")
    p.add_argument("--spec")
    p.add_argument("--mode", choices=("optimum", "classical", "schatten", "overlap"), default="optimum")
    p.add_argument("--pair", help="two-projector dominance check for r1,r2,c,d")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=2)

    p = add("erasure", cmd_erasure, "erasure channel tables")
    p.add_argument("--table", choices=("q4", "ekr", "r4", "capacity", "threshold"), default="q4")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--q", type=float, default=0.6)
    p.add_argument("--nmax", type=int, default=60)
    p.add_argument("--d", type=int, default=2)

    p = add("quantum-demo", cmd_quantum_demo, "isotropic pairs against the quantum bounds")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--state", help="state JSON; print its entropies instead")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FormatError, InvalidDistribution, PreconditionViolated, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
