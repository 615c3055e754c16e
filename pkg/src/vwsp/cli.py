"""``vwsp`` command line.

Exit codes: 0 solved to optimality, 2 bad input (unreadable or malformed
instance, bad flags), 3 time limit hit (best plan so far is printed),
4 ``--oracle-check`` disagreement.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import _kernel
from .bench import parse_grid, product_grid, run_bench, series_csv, to_csv
from .generator import GeneratorParams, generate
from .io import FormatError, dump_instance, load_instance
from .mip import MipError, export_mip
from .oracle import OracleTooLarge, oracle_by_patterns, oracle_by_plans
from .solver import SolveConfig, solve

EXIT_OK, EXIT_INPUT, EXIT_TIME_LIMIT, EXIT_MISMATCH = 0, 2, 3, 4
TIME_LIMIT_ENV = "VWSP_TIME_LIMIT"
BENCH_TIME_LIMIT = 60.0


class InputError(Exception):
    pass


def _env_time_limit(default=None):
    raw = os.environ.get(TIME_LIMIT_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"{TIME_LIMIT_ENV}={raw!r} is not a number") from None


def _load(path):
    try:
        return load_instance(path)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except FormatError as e:
        raise InputError(f"{path}: {e}") from None


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _backend(name):
    return None if name == "auto" else name


def cmd_generate(args) -> int:
    params = GeneratorParams(args.k, args.d, args.alpha, args.seed)
    try:
        inst = generate(params)
    except ValueError as e:
        raise InputError(str(e)) from None
    _write(dump_instance(inst), args.out)
    return EXIT_OK


def _solve_text(inst, rep, timing: bool) -> str:
    lines = [f"status: {rep.termination}",
             f"weight: {rep.weight}",
             f"constraint weight: {rep.constraint_weight}",
             f"authorisation weight: {rep.authorisation_weight}",
             f"lower bound: {rep.lower_bound}",
             "plan:"]
    lines += [f"  s{s} -> u{u}" for s, u in enumerate(rep.plan.assignment)]
    lines.append(f"nodes: {rep.nodes}  leaves: {rep.leaves}  matchings: {rep.matchings}")
    lines.append(f"backend: {rep.backend}")
    if timing:
        lines.append(f"time: {rep.wall_time:.4f} s")
    return "\n".join(lines) + "\n"


def _solve_csv(rep, timing: bool) -> str:
    head = "status,weight,w_c,w_a,lower_bound,nodes,leaves,matchings,backend,time,plan"
    plan = " ".join(str(u) for u in rep.plan.assignment)
    t = f"{rep.wall_time:.4f}" if timing else ""
    row = (f"{rep.termination},{rep.weight},{rep.constraint_weight},"
           f"{rep.authorisation_weight},{rep.lower_bound},{rep.nodes},{rep.leaves},"
           f"{rep.matchings},{rep.backend},{t},{plan}")
    return head + "\n" + row + "\n"


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    limit = args.time_limit if args.time_limit is not None else _env_time_limit()
    rep = solve(inst, SolveConfig(time_limit=limit, backend=_backend(args.backend)))
    out = _solve_csv(rep, not args.no_timing) if args.format == "csv" else \
        _solve_text(inst, rep, not args.no_timing)
    _write(out, args.out)
    if args.oracle_check:
        if inst.k > 7:
            raise InputError("--oracle-check needs k <= 7")
        ref = oracle_by_patterns(inst)
        if not rep.optimal or ref.weight != rep.weight:
            print(f"oracle check FAILED: solver {rep.weight} ({rep.termination}), "
                  f"oracle {ref.weight}", file=sys.stderr)
            return EXIT_MISMATCH
        print(f"oracle check: agrees ({ref.weight})", file=sys.stderr)
    return EXIT_OK if rep.optimal else EXIT_TIME_LIMIT


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    fn = oracle_by_plans if args.method == "plans" else oracle_by_patterns
    try:
        res = fn(inst)
    except OracleTooLarge as e:
        raise InputError(str(e)) from None
    lines = [f"weight: {res.weight}",
             f"optimal {'plans' if args.method == 'plans' else 'patterns'}: {res.optimal_count}",
             f"evaluated: {res.evaluated}", "plan:"]
    lines += [f"  s{s} -> u{u}" for s, u in enumerate(res.plan.assignment)]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_export_mip(args) -> int:
    inst = _load(args.instance)
    try:
        text = export_mip(inst)
    except MipError as e:
        raise InputError(str(e)) from None
    _write(text, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.grid is not None:
        try:
            grid = parse_grid(args.grid)
        except ValueError as e:
            raise InputError(str(e)) from None
    else:
        grid = product_grid(args.k, args.d, args.alpha)
    seeds = args.seed_list if args.seed_list is not None else \
        list(range(args.first_seed, args.first_seed + args.seeds))
    limit = args.time_limit if args.time_limit is not None else \
        _env_time_limit(BENCH_TIME_LIMIT)
    rows = run_bench(grid, seeds, SolveConfig(time_limit=limit, backend=_backend(args.backend)),
                     workers=args.workers)
    _write(to_csv(rows, summary=not args.no_summary, times=not args.no_timing), args.out)
    if args.series:
        Path(args.series).write_text(series_csv(rows))
    return EXIT_OK


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vwsp", description="Exact solver for the valued workflow satisfiability problem.",
        epilog=f"Exit codes: 0 optimal, 2 input error, 3 time limit, 4 oracle mismatch. "
               f"{TIME_LIMIT_ENV} sets the default time limit in seconds.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded random instance")
    g.add_argument("--k", type=int, required=True, help="number of steps (>= 5)")
    g.add_argument("--d", type=float, required=True, help="not-equals density in [0, 1]")
    g.add_argument("--alpha", type=float, required=True,
                   help="counting constraints of each kind per step")
    g.add_argument("--seed", type=int, default=0, help="64-bit generator seed (default 0)")
    g.add_argument("--out", help="output file (default stdout)")
    g.set_defaults(func=cmd_generate)

    backends = ["auto", "compiled", "python"]

    s = sub.add_parser("solve", help="solve an instance file to optimality")
    s.add_argument("instance", help="instance JSON file")
    s.add_argument("--time-limit", type=float,
                   help=f"seconds before giving up with the best plan (default ${TIME_LIMIT_ENV} or none)")
    s.add_argument("--oracle-check", action="store_true",
                   help="re-solve by exhaustive enumeration (k <= 7) and compare")
    s.add_argument("--format", choices=["text", "csv"], default="text", help="report format")
    s.add_argument("--backend", choices=backends, default="auto",
                   help="search kernel (auto: compiled if built, else python)")
    s.add_argument("--no-timing", action="store_true", help="omit wall time from the report")
    s.add_argument("--out", help="report file (default stdout)")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="brute-force optimum of a small instance")
    o.add_argument("instance", help="instance JSON file")
    o.add_argument("--method", choices=["plans", "patterns"], default="patterns",
                   help="enumerate all plans or all patterns (default patterns)")
    o.add_argument("--out", help="report file (default stdout)")
    o.set_defaults(func=cmd_oracle)

    m = sub.add_parser("export-mip", help="write the MIP model in LP format")
    m.add_argument("--in", dest="instance", required=True, help="instance JSON file")
    m.add_argument("--out", help="LP file (default stdout)")
    m.set_defaults(func=cmd_export_mip)

    b = sub.add_parser("bench", help="solve generated instances over a grid, CSV out")
    b.add_argument("--grid", help="explicit grid 'k:d:alpha,...' (overrides --k/--d/--alpha)")
    b.add_argument("--k", type=_ints, default=[20, 25], help="comma list of k (default 20,25)")
    b.add_argument("--d", type=_floats, default=[0.1, 0.2, 0.3],
                   help="comma list of densities (default 0.1,0.2,0.3)")
    b.add_argument("--alpha", type=_floats, default=[0.5, 1.0],
                   help="comma list of alpha values (default 0.5,1.0)")
    b.add_argument("--seeds", type=int, default=100, help="seeds per grid point (default 100)")
    b.add_argument("--first-seed", type=int, default=0, help="first seed (default 0)")
    b.add_argument("--seed-list", type=_ints, help="explicit comma list of seeds")
    b.add_argument("--time-limit", type=float,
                   help=f"seconds per instance (default ${TIME_LIMIT_ENV} or {BENCH_TIME_LIMIT:g})")
    b.add_argument("--workers", type=int, default=1, help="parallel solver processes")
    b.add_argument("--backend", choices=backends, default="auto", help="search kernel")
    b.add_argument("--no-summary", action="store_true", help="omit per-grid-point summary rows")
    b.add_argument("--no-timing", action="store_true", help="leave time columns empty")
    b.add_argument("--series", help="also write percent solved per k to this CSV file")
    b.add_argument("--out", help="CSV file (default stdout)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "backend", None) == "compiled" and not _kernel.HAVE_COMPILED:
            raise InputError("compiled kernel not built")
        return args.func(args)
    except InputError as e:
        print(f"vwsp: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
