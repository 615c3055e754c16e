"""Pure-Python depth-first pattern branch and bound.

Mirrors ``_csearch.pyx`` decision for decision; both must return identical
results (same incumbent pattern, same counters).
"""
from __future__ import annotations

import time
from typing import Optional

from .assignment import hungarian


def search(ci, upper: int, lam: int, prune: bool = True,
           deadline: Optional[float] = None) -> dict:
    """Search patterns for a plan cheaper than ``upper``.

    ``upper`` is the incumbent weight, ``lam`` a proven lower bound on the
    optimum.  Children are entered only while ``L(child) < incumbent`` and
    ``incumbent > lam``; with ``prune`` off, ``L`` is treated as 0.
    Returns the best weight, its block masks (``None`` when nothing beat
    ``upper``) and search counters.
    """
    k, n, nc = ci.k, ci.n, ci.nc
    step_cons = ci.step_cons
    scope_mask = ci.scope_mask
    widths = [t + 1 for t in ci.scope_size]
    bounds = ci.bounds
    imp_inc = ci.imp_inc
    scope_steps = ci.scope_steps
    order = ci.step_order
    weight_mask = ci.weight_mask
    max_blocks = min(k, n)
    users = range(n)

    q = [0] * nc
    a = [0] * nc
    score = list(ci.imp_static)
    placed = [False] * k
    blocks: list[int] = []
    bmin: list[int] = []

    top_cache: dict[int, list] = {}

    def ranked(mask: int) -> list:
        # the cheapest min(k, n) users for a block, ties by user index
        r = top_cache.get(mask)
        if r is None:
            r = sorted((weight_mask(mask, u), u) for u in users)[:max_blocks]
            top_cache[mask] = r
        return r

    st = {"best": upper, "best_blocks": None, "nodes": 0, "leaves": 0,
          "matchings": 0, "timed_out": False}

    def leaf_weight(cons_w: int) -> int:
        st["leaves"] += 1
        rows = [ranked(m) for m in blocks]
        seen = set()
        total = 0
        for r in rows:
            w, u = r[0]
            if u in seen:
                break
            seen.add(u)
            total += w
        else:
            return cons_w + total
        st["matchings"] += 1
        p = len(rows)
        cols = sorted({u for r in rows for _, u in r[:p]})
        cost = [[weight_mask(m, u) for u in cols] for m in blocks]
        return cons_w + hungarian(cost)[1]

    def explore(depth: int, cons_lb: int, bmin_sum: int):
        if depth == k:
            w = leaf_weight(cons_lb)
            if w < st["best"]:
                st["best"] = w
                st["best_blocks"] = list(blocks)
            return
        st["nodes"] += 1
        if deadline is not None and time.monotonic() > deadline:
            st["timed_out"] = True
            return

        if order is not None:
            s = next(t for t in order if not placed[t])
        else:
            s, best_score = -1, -1
            for t in range(k):
                if not placed[t] and score[t] > best_score:
                    s, best_score = t, score[t]
        bit = 1 << s
        cs = step_cons[s]
        placed[s] = True
        base = cons_lb
        for c in cs:
            w = widths[c]
            base -= bounds[c][q[c] * w + a[c]]
            a[c] += 1
            inc = imp_inc[c]
            for t in scope_steps[c]:
                score[t] += inc

        nb = len(blocks)
        for b in range(nb + 1):
            if st["timed_out"] or not st["best"] > lam:
                break
            if b == nb:
                if nb == max_blocks:
                    break
                old = 0
            else:
                old = blocks[b]
            new = old | bit
            lb_c = base
            for c in cs:
                qc = q[c] + (0 if old & scope_mask[c] else 1)
                lb_c += bounds[c][qc * widths[c] + a[c]]
            old_min = bmin[b] if b < nb else 0
            new_min = ranked(new)[0][0]
            lb = lb_c + bmin_sum - old_min + new_min
            if prune and lb >= st["best"]:
                continue
            bumped = [c for c in cs if not old & scope_mask[c]]
            for c in bumped:
                q[c] += 1
            if b == nb:
                blocks.append(new)
                bmin.append(new_min)
            else:
                blocks[b] = new
                bmin[b] = new_min
            explore(depth + 1, lb_c, bmin_sum - old_min + new_min)
            if b == nb:
                blocks.pop()
                bmin.pop()
            else:
                blocks[b] = old
                bmin[b] = old_min
            for c in bumped:
                q[c] -= 1

        for c in cs:
            a[c] -= 1
            inc = imp_inc[c]
            for t in scope_steps[c]:
                score[t] -= inc
        placed[s] = False

    explore(0, sum(b[0] for b in bounds), 0)
    return {
        "weight": st["best"],
        "blocks": st["best_blocks"],
        "nodes": st["nodes"],
        "leaves": st["leaves"],
        "matchings": st["matchings"],
        "timed_out": st["timed_out"],
    }
