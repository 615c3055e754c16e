"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the
terminal summary of the run.
"""
import functools
import itertools
import random
import statistics
import subprocess
import sys
import time

from vwsp import (Additive, AuthorisationModel, GeneratorParams, Pattern, Plan, SolveConfig,
                  WorkflowInstance, generate, solve, total_weight)
from vwsp.assignment import optimal_plan_for_pattern
from vwsp.constraints import Kind
from vwsp.mip import build_mip, check_plan_against_mip
from vwsp.model import constraint_weight, pattern_lower_bound
from vwsp.oracle import best_completion, oracle_by_patterns, oracle_by_plans
from vwsp.solver import is_satisfiable

from instances import oracle_sizes, random_instance
from test_constraints import counting_tables

SUITE_SIZE = 240


@functools.lru_cache(maxsize=None)
def oracle_suite():
    """Random instances with k <= 7, n <= 12 and every authorisation form."""
    rng = random.Random(20240601)
    shapes = oracle_sizes()
    return [random_instance(rng, *shapes[i % len(shapes)]) for i in range(SUITE_SIZE)]


@functools.lru_cache(maxsize=None)
def suite_results():
    t0 = time.monotonic()
    out = []
    for inst in oracle_suite():
        out.append((solve(inst).weight, oracle_by_plans(inst).weight,
                    oracle_by_patterns(inst).weight))
    return out, time.monotonic() - t0


def test_c01_oracle_equivalence(criterion):
    res, elapsed = suite_results()
    bad = [i for i, (a, b, c) in enumerate(res) if not a == b == c]
    kinds = {c.kind for inst in oracle_suite() for c in inst.constraints}
    forms = {f.form for inst in oracle_suite() for f in inst.auth.users}
    ok = (len(res) >= 200 and not bad and elapsed < 60 and len(kinds) == 3 and len(forms) == 4
          and all(inst.k <= 7 and inst.n <= 12 for inst in oracle_suite()))
    criterion(1, "branch and bound = plan oracle = pattern oracle", ok,
              f"{len(res)} instances, {len(bad)} mismatches, {elapsed:.1f} s")


def test_c02_zero_iff_satisfiable(criterion):
    res, _ = suite_results()
    bad = [i for i, inst in enumerate(oracle_suite())
           if (res[i][0] == 0) != is_satisfiable(inst)]
    zeros = sum(1 for r in res if r[0] == 0)
    criterion(2, "optimum is 0 iff the all-hard decision problem is satisfiable",
              not bad and 0 < zeros < len(res),
              f"{len(res)} instances, {zeros} zero-weight, {len(bad)} violations")


def random_partial_pattern(rng, k):
    covered = rng.sample(range(k), rng.randint(0, k))
    blocks: dict = {}
    for s in covered:
        blocks.setdefault(rng.randrange(len(blocks) + 1), set()).add(s)
    return Pattern(tuple(frozenset(b) for b in blocks.values()))


def test_c03_bound_admissible(criterion):
    rng = random.Random(3)
    pairs = violations = 0
    while pairs < 1200:
        k = rng.randint(1, 6)
        n = rng.randint(1, {1: 8, 2: 8, 3: 8, 4: 8, 5: 6, 6: 5}[k])
        inst = random_instance(rng, k, n)
        for _ in range(6):
            p = random_partial_pattern(rng, k)
            best = best_completion(inst, p.blocks)
            if best is None:
                continue
            pairs += 1
            if pattern_lower_bound(inst, p) > best:
                violations += 1
    criterion(3, "pattern lower bound never exceeds the best completion",
              violations == 0, f"{pairs} pairs, {violations} violations")


@functools.lru_cache(maxsize=None)
def reachable_levels(t, q, a):
    """Final distinct-user counts over every completion of a partial scope.

    ``q`` users already cover ``a`` scope steps.  Each remaining step goes to
    one of those users or to one of ``t - a`` fresh ones.
    """
    rest = t - a
    labels = range(q + rest)
    return frozenset(len(set(range(q)) | set(c)) for c in itertools.product(labels, repeat=rest))


def test_c04_counting_bound_exact(criterion):
    checked = violations = tables = 0
    for c in counting_tables(max_size=6, max_step=3):
        tables += 1
        t = c.size
        for a in range(t + 1):
            for q in range(0 if a == 0 else 1, a + 1):
                want = min(c.weight(x) for x in reachable_levels(t, q, a))
                checked += 1
                if c.bound_table()[q][a] != want:
                    violations += 1
    kinds = {c.kind for c in counting_tables(max_size=6, max_step=3)}
    criterion(4, "l(q, a) equals the exhaustive minimum over completions",
              violations == 0 and kinds == {Kind.AT_MOST, Kind.AT_LEAST},
              f"{tables} tables with |T| <= 6, {checked} (q, a) cells, {violations} violations")


def test_c05_matching_exact(criterion):
    rng = random.Random(5)
    violations = 0
    for _ in range(500):
        n = rng.randint(1, 8)
        p = rng.randint(1, min(6, n))
        cost = [[rng.choice([0, 1, 2, 3, 5, 8, 13]) for _ in range(n)] for _ in range(p)]
        users = [Additive(tuple(cost[s][u] for s in range(p))) for u in range(n)]
        inst = WorkflowInstance(p, AuthorisationModel(p, users))
        pat = Pattern(tuple(frozenset((s,)) for s in range(p)))
        _, w = optimal_plan_for_pattern(inst, pat)
        want = min(sum(cost[i][perm[i]] for i in range(p))
                   for perm in itertools.permutations(range(n), p))
        violations += w != want
    criterion(5, "block to user matching is optimal", violations == 0,
              f"500 cost matrices, p <= 6, n <= 8, {violations} violations")


def test_c06_user_independence(criterion):
    rng = random.Random(6)
    violations = 0
    for _ in range(600):
        k, n = rng.randint(2, 10), rng.randint(1, 10)
        inst = random_instance(rng, k, n, forms=("additive", "employee", "consultant"))
        plan = Plan(tuple(rng.randrange(n) for _ in range(k)))
        perm = list(range(n))
        rng.shuffle(perm)
        moved = Plan(tuple(perm[u] for u in plan.assignment))
        violations += constraint_weight(inst, plan) != constraint_weight(inst, moved)
    criterion(6, "constraint weight invariant under user permutations", violations == 0,
              f"600 pairs, {violations} violations")


def test_c07_generator_counts(criterion):
    bad = []
    grid = list(itertools.product([20, 25, 30, 35], [0.1, 0.2, 0.3], [0.5, 1.0]))
    for k, d, a in grid:
        inst = generate(GeneratorParams(k, d, a, 1))
        kinds = [c.kind for c in inst.constraints]
        # integer form of floor((d k (k-1) + 1) / 2) with d in tenths
        tenths = round(d * 10)
        ne = (tenths * k * (k - 1) + 10) // 20
        m = (round(a * 10) * k + 5) // 10
        if (inst.n != 10 * k + 10 or kinds.count(Kind.NOT_EQUALS) != ne
                or kinds.count(Kind.AT_MOST) != m or kinds.count(Kind.AT_LEAST) != m):
            bad.append((k, d, a))
    k20 = generate(GeneratorParams(20, 0.2, 1.0, 0))
    ne20 = sum(1 for c in k20.constraints if c.kind is Kind.NOT_EQUALS)
    criterion(7, "generator user and constraint counts", not bad and ne20 == 38,
              f"{len(grid)} grid points, {len(bad)} mismatches, k=20 d=0.2 -> {ne20} not-equals")


@functools.lru_cache(maxsize=None)
def trend_runs():
    t0 = time.monotonic()
    easy = [solve(generate(GeneratorParams(20, 0.1, 0.5, s))) for s in range(100)]
    hard = [solve(generate(GeneratorParams(20, 0.2, 1.0, s))) for s in range(100)]
    return easy, hard, time.monotonic() - t0


def test_c08_trend_bands(criterion):
    easy, hard, elapsed = trend_runs()
    sat_easy = sum(r.weight == 0 for r in easy)
    sat_hard = sum(r.weight == 0 for r in hard)
    mean_hard = statistics.mean(r.weight for r in hard)
    ok = (all(r.optimal for r in easy + hard) and sat_easy >= 90 and sat_hard <= 10
          and 5 <= mean_hard <= 40 and elapsed <= 15 * 60)
    criterion(8, "generator trend bands", ok,
              f"(20,0.1,0.5): {sat_easy}% satisfiable; (20,0.2,1.0): {sat_hard}% satisfiable, "
              f"mean optimum {mean_hard:.2f}; {elapsed:.1f} s")


def test_c09_performance(criterion):
    _, hard, _ = trend_runs()
    median = statistics.median(r.wall_time for r in hard)
    big = [solve(generate(GeneratorParams(25, 0.3, 1.0, s)), SolveConfig(time_limit=120))
           for s in range(10)]
    worst = max(r.wall_time for r in big)
    ok = median <= 10 and all(r.optimal for r in big) and worst <= 120
    criterion(9, "solve time bands", ok,
              f"median {median:.3f} s at (20,0.2,1.0); worst {worst:.2f} s over 10 "
              f"instances at (25,0.3,1.0); backend {hard[0].backend}")


def test_c10_mip_consistency(criterion):
    rng = random.Random(10)
    opt_bad = plan_bad = non_opt = 0
    for i in range(20):
        k = [8, 10, 12, 14, 16, 18, 20][i % 7]
        inst = generate(GeneratorParams(k, [0.1, 0.2, 0.3][i % 3], [0.5, 1.0][i % 2], i))
        model = build_mip(inst)
        rep = solve(inst)
        opt_bad += check_plan_against_mip(inst, rep.plan, model) != rep.weight
        for _ in range(5):
            plan = Plan(tuple(rng.randrange(inst.n) for _ in range(inst.k)))
            w = total_weight(inst, plan)
            non_opt += w != rep.weight
            plan_bad += check_plan_against_mip(inst, plan, model) != w
    criterion(10, "MIP objective equals plan weight",
              opt_bad == 0 and plan_bad == 0 and non_opt >= 100,
              f"20 optimal plans ({opt_bad} mismatches), {non_opt} non-optimal random plans "
              f"({plan_bad} mismatches)")


def test_c11_determinism(criterion, tmp_path):
    def run(*args):
        return subprocess.run([sys.executable, "-m", "vwsp", *args], capture_output=True,
                              check=True).stdout

    gens = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        run("generate", "--k", "20", "--d", "0.2", "--alpha", "1.0", "--seed", "11",
            "--out", str(path))
        gens.append(path.read_bytes())
    solves = [run("solve", str(tmp_path / "a.json"), "--no-timing") for _ in range(2)]
    csvs = [run("solve", str(tmp_path / "a.json"), "--format", "csv", "--no-timing")
            for _ in range(2)]
    benches = [run("bench", "--grid", "10:0.2:1.0", "--seeds", "3", "--no-timing")
               for _ in range(2)]
    ok = gens[0] == gens[1] and solves[0] == solves[1] and csvs[0] == csvs[1] \
        and benches[0] == benches[1]
    criterion(11, "repeated generate / solve / bench output is byte-identical", ok,
              "generate, solve text, solve csv, bench csv")
