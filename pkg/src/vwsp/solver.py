"""Pattern branch and bound for Valued WSP."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import _kernel
from ._compile import CompiledInstance, ImportanceParams, step_importance
from .assignment import optimal_plan_for_pattern
from .auth import (CONSULTANT_IN_PENALTY, CONSULTANT_OUT_PENALTY, EMPLOYEE_B_PENALTY,
                   EMPLOYEE_OUT_PENALTY, Additive, AuthorisationModel, Consultant, Employee,
                   Table)
from .constraints import Kind, WeightedConstraint
from .model import (Pattern, Plan, WorkflowInstance, authorisation_weight, constraint_weight,
                    total_weight)

__all__ = ["SolveConfig", "SolveReport", "solve", "global_lower_bound",
           "heuristic_upper_bound", "reduce_to_wsp", "step_importance", "ImportanceParams",
           "is_satisfiable"]

OPTIMAL, BOUND_MET, TIME_LIMIT = "optimal", "bound-met", "time-limit"


@dataclass(frozen=True)
class SolveConfig:
    time_limit: Optional[float] = None
    importance: ImportanceParams = ImportanceParams()
    # fixed step order overriding the importance score (testing hook)
    step_order: Optional[Sequence[int]] = None
    prune: bool = True
    global_bounds: bool = True
    backend: Optional[str] = None


@dataclass
class SolveReport:
    plan: Plan
    weight: int
    constraint_weight: int
    authorisation_weight: int
    lower_bound: int
    nodes: int
    leaves: int
    matchings: int
    wall_time: float
    termination: str
    backend: str
    counters: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.termination in (OPTIMAL, BOUND_MET)

    def stats_key(self) -> tuple:
        """Everything except the wall time; equal for identical runs."""
        return (self.plan, self.weight, self.constraint_weight, self.authorisation_weight,
                self.lower_bound, self.nodes, self.leaves, self.matchings, self.termination)


def _harden(c: WeightedConstraint, x: int) -> Optional[WeightedConstraint]:
    # levels with penalty >= x become hard (unit penalty); the rest are free
    t = c.size
    hard = [q for q in range(1, t + 1) if c.penalties[q] >= x]
    if not hard:
        return None
    pen = (0,) + tuple(1 if q in hard else 0 for q in range(1, t + 1))
    r = min(hard) - 1 if c.kind is Kind.AT_MOST else max(hard) + 1
    return WeightedConstraint(c.kind, c.scope, r, pen)


def _harden_form(f, k: int, x: int):
    if isinstance(f, Additive):
        return Additive(tuple(1 if w >= x else 0 for w in f.weights))
    if isinstance(f, Employee):
        forbid = 0
        if EMPLOYEE_B_PENALTY >= x:
            forbid |= f.B
        if EMPLOYEE_OUT_PENALTY >= x:
            forbid |= ~(f.A | f.B) & ((1 << k) - 1)
        return Additive(tuple((forbid >> s) & 1 for s in range(k)))
    if isinstance(f, Consultant):
        forbid = 0
        if CONSULTANT_IN_PENALTY >= x:
            forbid = (1 << k) - 1
        elif CONSULTANT_OUT_PENALTY >= x:
            forbid = ~f.A & ((1 << k) - 1)
        return Additive(tuple((forbid >> s) & 1 for s in range(k)))
    if isinstance(f, Table):
        return Table({m: 1 if w >= x else 0 for m, w in f.entries.items()})
    raise TypeError(f"unknown form {f!r}")


def reduce_to_wsp(inst: WorkflowInstance, x: int) -> WorkflowInstance:
    """Decision instance: restrictions penalised ``>= x`` become hard, others vanish.

    Hard restrictions carry unit penalty, so the result has a zero-weight
    plan exactly when the decision problem is satisfiable.
    """
    if x < 1:
        raise ValueError("threshold must be >= 1")
    cons = tuple(h for h in (_harden(c, x) for c in inst.constraints) if h is not None)
    users = [_harden_form(f, inst.k, x) for f in inst.auth.users]
    return WorkflowInstance(inst.k, AuthorisationModel(inst.k, users), cons,
                            meta={"reduced_from": x})


def _run(inst: WorkflowInstance, upper: int, lam: int, config: SolveConfig,
         deadline: Optional[float], prune: bool = True):
    ci = CompiledInstance(inst, config.importance, config.step_order)
    search, name = _kernel.select(ci, config.backend)
    res = search(ci, upper, lam, prune, deadline)
    res["backend"] = name
    return res


def _decide(inst: WorkflowInstance, x: int, config: SolveConfig,
            deadline: Optional[float]) -> tuple[Optional[Pattern], dict]:
    reduced = reduce_to_wsp(inst, x)
    res = _run(reduced, 1, 0, config, deadline)
    if res["blocks"] is None:
        return None, res
    return Pattern.from_masks(res["blocks"]), res


def is_satisfiable(inst: WorkflowInstance, config: SolveConfig = SolveConfig()) -> bool:
    """Whether the plain WSP (every penalty hard) has a valid plan."""
    return _decide(inst, 1, config, None)[0] is not None


def global_lower_bound(inst: WorkflowInstance, config: SolveConfig = SolveConfig()
                       ) -> tuple[int, Optional[Plan]]:
    """Solve the all-hard decision problem.

    Returns ``(0, plan)`` with a zero-weight plan when it is satisfiable and
    ``(1, None)`` otherwise.
    """
    pat, _ = _decide(inst, 1, config, None)
    if pat is None:
        return 1, None
    return 0, optimal_plan_for_pattern(inst, pat)[0]


def _trivial_plan(inst: WorkflowInstance) -> Plan:
    full = (1 << inst.k) - 1
    _, u = inst.auth.block_min_weight(full)
    return Plan((u,) * inst.k)


def heuristic_upper_bound(inst: WorkflowInstance, config: SolveConfig = SolveConfig(),
                          threshold: Optional[int] = None) -> tuple[Plan, bool]:
    """Upper-bound plan from the decision problem at the largest penalty.

    Only the most heavily penalised restrictions are hard.  If some plan
    avoids all of them, the cheapest plan sharing its pattern is returned
    with ``True``; otherwise every step goes to the user cheapest for the
    whole step set and ``False`` says the threshold itself is a lower bound.
    """
    x = threshold if threshold is not None else inst.max_penalty
    x = max(x, 1)
    pat, _ = _decide(inst, x, config, None)
    if pat is None:
        return _trivial_plan(inst), False
    return optimal_plan_for_pattern(inst, pat)[0], True


def solve(inst: WorkflowInstance, config: SolveConfig = SolveConfig()) -> SolveReport:
    t0 = time.monotonic()
    deadline = t0 + config.time_limit if config.time_limit is not None else None
    counters = {"nodes": 0, "leaves": 0, "matchings": 0}
    backend = None

    def tally(res):
        nonlocal backend
        for key in counters:
            counters[key] += res[key]
        backend = res["backend"]

    lam, plan = 0, None
    if config.global_bounds and config.prune:
        pat, res = _decide(inst, 1, config, deadline)
        tally(res)
        if res["timed_out"]:
            pass
        elif pat is None:
            lam = 1
            m = max(inst.max_penalty, 1)
            pat_m, res = _decide(inst, m, config, deadline)
            tally(res)
            if pat_m is not None:
                plan = optimal_plan_for_pattern(inst, pat_m)[0]
            elif not res["timed_out"]:
                lam = m
        else:
            plan = optimal_plan_for_pattern(inst, pat)[0]
    if plan is None:
        plan = _trivial_plan(inst)

    best = total_weight(inst, plan)
    timed_out = deadline is not None and time.monotonic() > deadline
    main = {"nodes": 0, "leaves": 0, "matchings": 0}
    if best > lam and not timed_out:
        upper = best if config.prune else best + 1 + _weight_ceiling(inst)
        res = _run(inst, upper, lam, config, deadline, prune=config.prune)
        tally(res)
        main = res
        timed_out = res["timed_out"]
        if res["blocks"] is not None and res["weight"] < best:
            plan, w_auth = optimal_plan_for_pattern(inst, Pattern.from_masks(res["blocks"]))
            best = total_weight(inst, plan)
            assert best == res["weight"], "kernel and plan weights disagree"
    if timed_out:
        term = TIME_LIMIT
    elif best <= lam:
        term = BOUND_MET
    else:
        term = OPTIMAL
    if backend is None:
        backend = _kernel.select(CompiledInstance(inst), config.backend)[1]
    counters.update({"main_nodes": main["nodes"]})
    return SolveReport(
        plan=plan, weight=best,
        constraint_weight=constraint_weight(inst, plan),
        authorisation_weight=authorisation_weight(inst, plan),
        lower_bound=lam, nodes=counters["nodes"], leaves=counters["leaves"],
        matchings=counters["matchings"], wall_time=time.monotonic() - t0,
        termination=term, backend=backend, counters=counters)


def _weight_ceiling(inst: WorkflowInstance) -> int:
    return (len(inst.constraints) + inst.k + 1) * max(inst.max_penalty, 1)
