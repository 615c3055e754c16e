"""Compare the compiled and pure-Python search kernels on generated instances.

    python benchmarks/bench_kernels.py --grid 20:0.2:1.0,25:0.3:1.0 --seeds 5

Both kernels must agree on weight and node count; the table shows wall
times and the speed-up.
"""
import argparse
import statistics
import sys

from vwsp import GeneratorParams, SolveConfig, generate, solve
from vwsp._kernel import HAVE_COMPILED
from vwsp.bench import parse_grid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", default="20:0.2:1.0,25:0.3:1.0")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--time-limit", type=float, default=300.0)
    args = ap.parse_args(argv)
    if not HAVE_COMPILED:
        sys.exit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    print(f"{'k':>3} {'d':>4} {'alpha':>5} {'seed':>4} {'weight':>8} {'nodes':>9} "
          f"{'compiled s':>10} {'python s':>9} {'speed-up':>8}")
    ups = []
    for k, d, a in parse_grid(args.grid):
        for seed in range(args.seeds):
            inst = generate(GeneratorParams(k, d, a, seed))
            fast = solve(inst, SolveConfig(time_limit=args.time_limit, backend="compiled"))
            slow = solve(inst, SolveConfig(time_limit=args.time_limit, backend="python"))
            if fast.optimal and slow.optimal:
                assert fast.stats_key() == slow.stats_key(), "kernels disagree"
            up = slow.wall_time / max(fast.wall_time, 1e-9)
            ups.append(up)
            print(f"{k:>3} {d:>4} {a:>5} {seed:>4} {fast.weight:>8} {fast.nodes:>9} "
                  f"{fast.wall_time:>10.3f} {slow.wall_time:>9.3f} {up:>7.1f}x")
    if ups:
        print(f"median speed-up {statistics.median(ups):.1f}x over {len(ups)} instances")


if __name__ == "__main__":
    main()
