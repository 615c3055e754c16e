"""Benchmark harness over generator parameter grids."""
from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .generator import GeneratorParams, generate
from .solver import SolveConfig, solve

FIELDS = ["record", "k", "d", "alpha", "seed", "satisfiable", "weight", "w_c", "w_a",
          "time", "nodes", "termination", "instances", "pct_solved", "pct_satisfiable"]
SERIES_FIELDS = ["d", "alpha", "k", "instances", "pct_solved"]


@dataclass(frozen=True)
class BenchRow:
    k: int
    d: float
    alpha: float
    seed: int
    satisfiable: Optional[bool]  # None when the run stopped early with weight > 0
    weight: Optional[int]
    w_c: Optional[int]
    w_a: Optional[int]
    time: float
    nodes: int
    termination: str

    @property
    def solved(self) -> bool:
        return self.termination in ("optimal", "bound-met")


def parse_grid(text: str) -> list:
    """``"20:0.1:0.5,25:0.2:1.0"`` -> ``[(20, 0.1, 0.5), (25, 0.2, 1.0)]``."""
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        parts = item.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid entry {item!r}: expected k:d:alpha")
        out.append((int(parts[0]), float(parts[1]), float(parts[2])))
    return out


def product_grid(ks: Sequence[int], ds: Sequence[float], alphas: Sequence[float]) -> list:
    return list(itertools.product(ks, ds, alphas))


def run_one(k: int, d: float, alpha: float, seed: int, config: SolveConfig) -> BenchRow:
    try:
        inst = generate(GeneratorParams(k, d, alpha, seed))
        rep = solve(inst, config)
    except Exception as e:  # recorded, the run goes on
        return BenchRow(k, d, alpha, seed, None, None, None, None, 0.0, 0,
                        f"error: {type(e).__name__}: {e}")
    sat = True if rep.weight == 0 else (False if rep.optimal else None)
    return BenchRow(k, d, alpha, seed, sat, rep.weight, rep.constraint_weight,
                    rep.authorisation_weight, rep.wall_time, rep.nodes, rep.termination)


def _one(args):
    return run_one(*args)


def run_bench(grid: Iterable, seeds: Sequence[int], config: SolveConfig = SolveConfig(),
              workers: int = 1) -> list:
    """One row per (grid point, seed), in grid order whatever the worker count."""
    jobs = [(k, d, a, s, config) for (k, d, a) in grid for s in seeds]
    if workers <= 1 or len(jobs) <= 1:
        return [_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one, jobs))


def _mean(xs) -> Optional[float]:
    xs = list(xs)
    return sum(xs) / len(xs) if xs else None


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.4f}".rstrip("0").rstrip(".") if v != int(v) else str(int(v))
    return str(v)


def summarise(rows: Sequence[BenchRow]) -> list:
    """Per grid point: percent solved and satisfiable, means over solved runs."""
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.k, r.d, r.alpha), []).append(r)
    out = []
    for (k, d, a), rs in groups.items():
        done = [r for r in rs if r.solved]
        out.append({
            "k": k, "d": d, "alpha": a, "instances": len(rs),
            "pct_solved": 100.0 * len(done) / len(rs),
            "pct_satisfiable": 100.0 * sum(1 for r in rs if r.satisfiable) / len(rs),
            "weight": _mean(r.weight for r in done),
            "w_c": _mean(r.w_c for r in done),
            "w_a": _mean(r.w_a for r in done),
            "time": _mean(r.time for r in done),
            "nodes": _mean(r.nodes for r in done),
        })
    return out


def solve_series(rows: Sequence[BenchRow]) -> list:
    """Percent solved per k for every (d, alpha): the data behind a solved-vs-k plot."""
    out = []
    for s in summarise(rows):
        out.append({"d": s["d"], "alpha": s["alpha"], "k": s["k"],
                    "instances": s["instances"], "pct_solved": s["pct_solved"]})
    out.sort(key=lambda r: (r["d"], r["alpha"], r["k"]))
    return out


def to_csv(rows: Sequence[BenchRow], summary: bool = True, times: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow([_fmt(v) for v in ("instance", r.k, r.d, r.alpha, r.seed, r.satisfiable,
                                      r.weight, r.w_c, r.w_a, r.time if times else None,
                                      r.nodes, r.termination, None, None, None)])
    if summary:
        for s in summarise(rows):
            w.writerow([_fmt(v) for v in ("summary", s["k"], s["d"], s["alpha"], None, None,
                                          s["weight"], s["w_c"], s["w_a"],
                                          s["time"] if times else None, s["nodes"], None,
                                          s["instances"], s["pct_solved"],
                                          s["pct_satisfiable"])])
    return buf.getvalue()


def series_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SERIES_FIELDS)
    for s in solve_series(rows):
        w.writerow([_fmt(s[f]) for f in SERIES_FIELDS])
    return buf.getvalue()
