"""Exhaustive reference solvers.

``oracle_by_plans`` evaluates every complete plan straight from the weight
definitions.  ``oracle_by_patterns`` enumerates every complete pattern and
matches its blocks to users.  Neither prunes anything.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import optimal_plan_for_pattern
from .model import (Plan, WorkflowInstance, enumerate_complete_patterns,
                    pattern_constraint_weight, total_weight)

PLAN_LIMIT = 10**7
PATTERN_LIMIT = 10**6
CHUNK = 1 << 15


class OracleTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    weight: int
    plan: Plan
    # optimal plans (plan oracle) or optimal patterns (pattern oracle)
    optimal_count: int
    evaluated: int


def bell(k: int) -> int:
    """Bell number via the Bell triangle."""
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def enumerate_plans(k: int, n: int, start: int, stop: int) -> np.ndarray:
    """Rows are plans ``start..stop-1``; step ``s`` is base-``n`` digit ``s``."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), k), dtype=np.int64)
    for s in range(k):
        out[:, s] = idx % n
        idx //= n
    return out


def plan_weights(inst: WorkflowInstance, plans: np.ndarray) -> np.ndarray:
    """Total weight of each row of ``plans`` from the definitions."""
    rows = plans.shape[0]
    total = np.zeros(rows, dtype=np.int64)
    for c in inst.constraints:
        cols = plans[:, list(c.scope)]
        distinct = np.ones(rows, dtype=np.int64)
        for i in range(1, cols.shape[1]):
            fresh = np.ones(rows, dtype=bool)
            for j in range(i):
                fresh &= cols[:, i] != cols[:, j]
            distinct += fresh
        total += np.asarray(c.penalties, dtype=np.int64)[distinct]
    bits = (np.int64(1) << np.arange(inst.k, dtype=np.int64))
    for u in range(inst.n):
        masks = ((plans == u) * bits).sum(axis=1)
        uniq, inv = np.unique(masks, return_inverse=True)
        w = np.array([inst.auth.weight_mask(int(m), u) for m in uniq], dtype=np.int64)
        total += w[inv.reshape(-1)]
    return total


def oracle_by_plans(inst: WorkflowInstance, limit: int = PLAN_LIMIT) -> OracleResult:
    k, n = inst.k, inst.n
    count = n**k
    if count > limit:
        raise OracleTooLarge(f"{n}^{k} = {count} plans exceeds the limit of {limit}")
    best, best_plan, n_best = None, None, 0
    for start in range(0, count, CHUNK):
        plans = enumerate_plans(k, n, start, min(count, start + CHUNK))
        w = plan_weights(inst, plans)
        m = int(w.min())
        if best is None or m < best:
            best = m
            best_plan = Plan(tuple(int(u) for u in plans[int(w.argmin())]))
            n_best = 0
        if m == best:
            n_best += int((w == m).sum())
    return OracleResult(best, best_plan, n_best, count)


def oracle_by_patterns(inst: WorkflowInstance, limit: int = PATTERN_LIMIT) -> OracleResult:
    if bell(inst.k) > limit:
        raise OracleTooLarge(f"B_{inst.k} = {bell(inst.k)} patterns exceeds the limit of {limit}")
    best, best_plan, n_best, seen = None, None, 0, 0
    for p in enumerate_complete_patterns(inst.k):
        seen += 1
        if len(p) > inst.n:
            continue
        plan, w_auth = optimal_plan_for_pattern(inst, p)
        w = pattern_constraint_weight(inst, p) + w_auth
        if best is None or w < best:
            best, best_plan, n_best = w, plan, 1
        elif w == best:
            n_best += 1
    assert total_weight(inst, best_plan) == best
    return OracleResult(best, best_plan, n_best, seen)


def best_completion(inst: WorkflowInstance, blocks, limit: int = PLAN_LIMIT):
    """Cheapest complete plan whose steps in ``blocks`` share users exactly
    as the blocks say; ``None`` if no plan does (too few users)."""
    k, n = inst.k, inst.n
    count = n**k
    if count > limit:
        raise OracleTooLarge(f"{n}^{k} = {count} plans exceeds the limit of {limit}")
    blocks = [sorted(b) for b in blocks]
    block_of = {s: i for i, b in enumerate(blocks) for s in b}
    covered = sorted(block_of)
    best = None
    for start in range(0, count, CHUNK):
        plans = enumerate_plans(k, n, start, min(count, start + CHUNK))
        ok = np.ones(plans.shape[0], dtype=bool)
        for i, s in enumerate(covered):
            for t in covered[i + 1:]:
                same = plans[:, s] == plans[:, t]
                ok &= same if block_of[s] == block_of[t] else ~same
        if not ok.any():
            continue
        m = int(plan_weights(inst, plans[ok]).min())
        if best is None or m < best:
            best = m
    return best
