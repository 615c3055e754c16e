"""Minimum-weight assignment of pattern blocks to distinct users."""
from __future__ import annotations

from typing import Sequence

from .model import Pattern, Plan, WorkflowInstance


class UnrealisablePattern(ValueError):
    pass


def hungarian(cost: Sequence[Sequence[int]]) -> tuple[list[int], int]:
    """Rectangular Hungarian method for ``rows <= cols`` integer costs.

    Returns the column chosen for each row and the total cost.  Every row gets
    a distinct column; runs in ``O(rows^2 * cols)``.
    """
    nr = len(cost)
    if nr == 0:
        return [], 0
    nc = len(cost[0])
    if nr > nc:
        raise UnrealisablePattern(f"{nr} rows cannot be matched into {nc} columns")
    inf = 4 * (1 + sum(max(row) for row in cost))
    u = [0] * (nr + 1)
    v = [0] * (nc + 1)
    match = [0] * (nc + 1)  # match[j] = row (1-based) holding column j
    way = [0] * (nc + 1)
    for i in range(1, nr + 1):
        match[0] = i
        j0 = 0
        minv = [inf] * (nc + 1)
        used = [False] * (nc + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            row = cost[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, nc + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(nc + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    cols = [0] * nr
    for j in range(1, nc + 1):
        if match[j]:
            cols[match[j] - 1] = j - 1
    return cols, sum(cost[i][cols[i]] for i in range(nr))


def lex_min_assignment(cost: Sequence[Sequence[int]]) -> tuple[list[int], int]:
    """Optimal assignment, lexicographically smallest column vector among ties.

    The tie-break is folded into the costs: row ``i`` choosing column ``j``
    pays an extra ``j * base**(rows-1-i)``, which only separates equal-cost
    optima since the whole perturbation stays below ``base**rows``.
    """
    nr = len(cost)
    if nr == 0:
        return [], 0
    base = len(cost[0])
    scale = base ** nr
    pert = [[c * scale + j * base ** (nr - 1 - i) for j, c in enumerate(row)]
            for i, row in enumerate(cost)]
    cols, _ = hungarian(pert)
    return cols, sum(cost[i][cols[i]] for i in range(nr))


def block_costs(inst: WorkflowInstance, masks: Sequence[int]) -> list[list[int]]:
    w = inst.auth.weight_mask
    return [[w(m, u) for u in range(inst.n)] for m in masks]


def optimal_plan_for_pattern(inst: WorkflowInstance, p: Pattern) -> tuple[Plan, int]:
    """Cheapest plan whose pattern is exactly ``p``; returns it with its
    authorisation weight.  Blocks go to distinct users."""
    if not p.is_complete(inst.k):
        raise ValueError("pattern is not complete")
    if len(p) > inst.n:
        raise UnrealisablePattern("pattern unrealisable: more blocks than users")
    cols, weight = lex_min_assignment(block_costs(inst, p.masks))
    assignment = [None] * inst.k
    for b, u in zip(p.blocks, cols):
        for s in b:
            assignment[s] = u
    return Plan(tuple(assignment)), weight
