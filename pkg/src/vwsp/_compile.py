"""Flat array form of an instance shared by both search kernels."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .auth import Additive, Consultant, Employee, Table
from .constraints import Kind
from .model import Pattern, WorkflowInstance

FORM_ADDITIVE, FORM_EMPLOYEE, FORM_CONSULTANT, FORM_TABLE = 0, 1, 2, 3


@dataclass(frozen=True)
class ImportanceParams:
    """Weights of the step-selection score.

    A step scores ``type_weight * (1 + placed/size)`` for every constraint on
    it, plus ``conflict`` for every (at-most, not-equals) or (at-most,
    at-least) pair of constraints that both contain it.
    """

    not_equals: int = 3
    at_most: int = 2
    at_least: int = 1
    conflict: int = 2

    def type_weight(self, kind: Kind) -> int:
        return {Kind.NOT_EQUALS: self.not_equals, Kind.AT_MOST: self.at_most,
                Kind.AT_LEAST: self.at_least}[kind]


def conflict_pairs(inst: WorkflowInstance, s: int) -> int:
    am = other = 0
    for c in inst.constraints:
        if s in c.scope:
            if c.kind is Kind.AT_MOST:
                am += 1
            else:
                other += 1
    return am * other


def step_importance(inst: WorkflowInstance, p: Pattern, s: int,
                    params: ImportanceParams = ImportanceParams()) -> Fraction:
    """Exact importance of adding step ``s`` to pattern ``p``."""
    covered = p.covered
    if s in covered:
        raise ValueError(f"step {s} already covered")
    score = Fraction(0)
    for c in inst.constraints:
        if s in c.scope:
            placed = sum(1 for t in c.scope if t in covered)
            score += params.type_weight(c.kind) * (1 + Fraction(placed, c.size))
    return score + params.conflict * conflict_pairs(inst, s)


class CompiledInstance:
    """Arrays consumed by the search kernels.

    Importance scores are scaled by the lcm of scope sizes so that both
    kernels compare them as exact integers.
    """

    def __init__(self, inst: WorkflowInstance, params: ImportanceParams = ImportanceParams(),
                 step_order: Optional[Sequence[int]] = None):
        k, n = inst.k, inst.n
        cons = inst.constraints
        self.k, self.n, self.nc = k, n, len(cons)
        self.instance = inst

        per_step: list[list[int]] = [[] for _ in range(k)]
        for i, c in enumerate(cons):
            for s in c.scope:
                per_step[s].append(i)
        self.step_cons = per_step
        self.step_cons_ptr = np.zeros(k + 1, dtype=np.int64)
        for s in range(k):
            self.step_cons_ptr[s + 1] = self.step_cons_ptr[s] + len(per_step[s])
        self.step_cons_idx = np.array([i for lst in per_step for i in lst], dtype=np.int64)

        self.scope_mask = [c.scope_mask for c in cons]
        self.scope_size = [c.size for c in cons]
        self.bounds = [[v for row in c.bound_table() for v in row] for c in cons]
        self.bound_ptr = np.zeros(len(cons) + 1, dtype=np.int64)
        for i, c in enumerate(cons):
            self.bound_ptr[i + 1] = self.bound_ptr[i] + (c.size + 1) ** 2
        self.bound_flat = np.array([v for b in self.bounds for v in b], dtype=np.int64)

        scale = 1
        for c in cons:
            scale = math.lcm(scale, c.size)
        self.imp_inc = [params.type_weight(c.kind) * scale // c.size for c in cons]
        self.imp_static = [
            sum(params.type_weight(cons[i].kind) * scale for i in per_step[s])
            + params.conflict * scale * conflict_pairs(inst, s)
            for s in range(k)]
        self.scope_steps = [list(c.scope) for c in cons]

        if step_order is not None:
            order = [int(s) for s in step_order]
            if sorted(order) != list(range(k)):
                raise ValueError("step_order must be a permutation of the steps")
            self.step_order = order
        else:
            self.step_order = None

        self.has_table = inst.auth.has_table
        forms = np.zeros(n, dtype=np.int64)
        mask_a = np.zeros(n, dtype=np.uint64)
        mask_b = np.zeros(n, dtype=np.uint64)
        addw = np.zeros((n, k), dtype=np.int64)
        for u, f in enumerate(inst.auth.users):
            if isinstance(f, Additive):
                forms[u] = FORM_ADDITIVE
                addw[u, :] = f.weights
            elif isinstance(f, Employee):
                forms[u] = FORM_EMPLOYEE
                mask_a[u], mask_b[u] = f.A, f.B
            elif isinstance(f, Consultant):
                forms[u] = FORM_CONSULTANT
                mask_a[u] = f.A
            elif isinstance(f, Table):
                forms[u] = FORM_TABLE
        self.forms, self.mask_a, self.mask_b, self.addw = forms, mask_a, mask_b, addw
        self.weight_mask = inst.auth.weight_mask

        # the compiled kernel keeps weights and matching potentials in int64
        biggest = (len(cons) + k + 1) * (k + 1) * max(inst.max_penalty, 1)
        self.int64_safe = biggest < 2**61

    def arrays(self) -> dict:
        """Contiguous numpy arrays for the compiled kernel."""
        scope_ptr = np.zeros(self.nc + 1, dtype=np.int64)
        for i, t in enumerate(self.scope_size):
            scope_ptr[i + 1] = scope_ptr[i] + t
        return {
            "step_cons_ptr": self.step_cons_ptr,
            "step_cons_idx": self.step_cons_idx,
            "scope_mask": np.array(self.scope_mask, dtype=np.uint64),
            "scope_size": np.array(self.scope_size, dtype=np.int64),
            "scope_ptr": scope_ptr,
            "scope_idx": np.array([s for st in self.scope_steps for s in st], dtype=np.int64),
            "bound_ptr": self.bound_ptr,
            "bound_flat": self.bound_flat,
            "imp_inc": np.array(self.imp_inc, dtype=np.int64),
            "imp_static": np.array(self.imp_static, dtype=np.int64),
            "order": np.array(self.step_order if self.step_order is not None else [],
                              dtype=np.int64),
            "forms": self.forms,
            "mask_a": self.mask_a,
            "mask_b": self.mask_b,
            "addw": self.addw,
        }
