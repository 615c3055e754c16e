"""Mixed integer programme for instances built from the closed user forms.

Variables (all in ``[0, 1]``):

* ``x_s{s}_u{u}``  binary, step ``s`` goes to user ``u``
* ``y_c{c}_u{u}``  continuous, user ``u`` works on the scope of constraint ``c``
* ``p_c{c}_q{q}``  binary, constraint ``c`` pays its level-``q`` marginal penalty
* ``z_u{u}``       continuous, consultant ``u`` does some step of ``A(u)``

Not-equals constraints are written as at-least-2.  The objective charges
marginal level penalties, so it equals the plan weight whenever the level
tables are monotone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .auth import (CONSULTANT_IN_PENALTY, CONSULTANT_OUT_PENALTY, EMPLOYEE_B_PENALTY,
                   EMPLOYEE_OUT_PENALTY, Additive, Consultant, Employee)
from .constraints import Kind
from .model import Plan, WorkflowInstance

TERMS_PER_LINE = 8


class MipError(ValueError):
    pass


@dataclass
class Row:
    name: str
    terms: list  # (variable, coefficient)
    sense: str  # "=", "<=", ">="
    rhs: int
    group: str


@dataclass
class MipModel:
    binaries: list = field(default_factory=list)
    continuous: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    @property
    def variables(self) -> list:
        return self.binaries + self.continuous

    def count(self, prefix: str) -> int:
        return sum(1 for v in self.variables if v.startswith(prefix))

    def row_value(self, row: Row, values: dict) -> int:
        return sum(c * values[v] for v, c in row.terms)

    def violated(self, row: Row, values: dict) -> bool:
        lhs = self.row_value(row, values)
        if row.sense == "=":
            return lhs != row.rhs
        if row.sense == "<=":
            return lhs > row.rhs
        return lhs < row.rhs

    def evaluate(self, values: dict, skip_groups: Iterable[str] = ()) -> int:
        """Objective at ``values`` after checking every row and bound."""
        skip = set(skip_groups)
        binary = set(self.binaries)
        for v in self.variables:
            x = values[v]
            if not 0 <= x <= 1 or (v in binary and x not in (0, 1)):
                raise MipError(f"variable {v}={x} outside its domain")
        for row in self.rows:
            if row.group not in skip and self.violated(row, values):
                raise MipError(f"row {row.name} violated")
        return sum(c * values[v] for v, c in self.objective.items())

    def to_lp(self, comment: Optional[str] = None) -> str:
        out = []
        if comment:
            out.append(f"\\ {comment}")
        out.append("Minimize")
        obj = [(v, self.objective[v]) for v in self.variables if self.objective.get(v)]
        if not obj:
            obj = [(self.variables[0], 0)]
        out.extend(_wrap("obj:", obj))
        out.append("Subject To")
        for row in self.rows:
            lines = _wrap(f"{row.name}:", row.terms)
            lines[-1] += f" {row.sense} {row.rhs}"
            out.extend(lines)
        out.append("Bounds")
        for v in self.continuous:
            out.append(f" 0 <= {v} <= 1")
        out.append("Binaries")
        for i in range(0, len(self.binaries), TERMS_PER_LINE):
            out.append(" " + " ".join(self.binaries[i:i + TERMS_PER_LINE]))
        out.append("End")
        return "\n".join(out) + "\n"

    def as_arrays(self):
        """``(c, rows, cols, vals, lo, hi, integral)`` for handing to a MIP solver.

        Row ``i`` of the sparse matrix is ``self.rows[i]``; ``lo``/``hi`` are the
        row bounds (``None`` meaning unbounded).
        """
        index = {v: i for i, v in enumerate(self.variables)}
        c = [0] * len(index)
        for v, w in self.objective.items():
            c[index[v]] = w
        ri, ci, vals, lo, hi = [], [], [], [], []
        for i, row in enumerate(self.rows):
            for v, w in row.terms:
                ri.append(i)
                ci.append(index[v])
                vals.append(w)
            lo.append(row.rhs if row.sense in ("=", ">=") else None)
            hi.append(row.rhs if row.sense in ("=", "<=") else None)
        integral = [1] * len(self.binaries) + [0] * len(self.continuous)
        return c, ri, ci, vals, lo, hi, integral


def _wrap(head: str, terms) -> list:
    parts = []
    for i, (v, c) in enumerate(terms):
        if i == 0:
            parts.append(f"- {v}" if c == -1 else (v if c == 1 else f"{c} {v}"))
        elif c < 0:
            parts.append(f"- {v}" if c == -1 else f"- {-c} {v}")
        else:
            parts.append(f"+ {v}" if c == 1 else f"+ {c} {v}")
    lines = []
    for i in range(0, len(parts), TERMS_PER_LINE):
        chunk = " ".join(parts[i:i + TERMS_PER_LINE])
        lines.append(f" {head} {chunk}" if i == 0 else f"   {chunk}")
    return lines


def _x(s, u):
    return f"x_s{s}_u{u}"


def _y(c, u):
    return f"y_c{c}_u{u}"


def _p(c, q):
    return f"p_c{c}_q{q}"


def _z(u):
    return f"z_u{u}"


def _levels(c):
    """Penalised levels with the marginal cost charged by each ``p`` variable."""
    pen, t, r = c.penalties, c.size, c.r
    if c.kind is Kind.AT_MOST:
        return [(q, pen[q] - pen[q - 1]) for q in range(r + 1, t + 1)]
    return [(q, pen[q] - pen[q + 1]) for q in range(1, r)]


def _step_weights(f, k: int) -> dict:
    # additive per-step costs for users outside the consultant form
    if isinstance(f, Employee):
        out = {}
        for s in range(k):
            if (f.B >> s) & 1:
                out[s] = EMPLOYEE_B_PENALTY
            elif not (f.A >> s) & 1:
                out[s] = EMPLOYEE_OUT_PENALTY
        return out
    return {s: w for s, w in enumerate(f.weights) if w}


def build_mip(inst: WorkflowInstance, order_rows: bool = True) -> MipModel:
    k, n = inst.k, inst.n
    for u, f in enumerate(inst.auth.users):
        if not isinstance(f, (Additive, Employee, Consultant)):
            raise MipError(f"user {u}: {f.form} form is not MIP-encodable")
    m = MipModel()
    m.binaries += [_x(s, u) for s in range(k) for u in range(n)]
    for i, c in enumerate(inst.constraints):
        m.continuous += [_y(i, u) for u in range(n)]
    for i, c in enumerate(inst.constraints):
        m.binaries += [_p(i, q) for q, _ in _levels(c)]
    consultants = [u for u, f in enumerate(inst.auth.users) if isinstance(f, Consultant)]
    m.continuous += [_z(u) for u in consultants]

    obj = m.objective
    for i, c in enumerate(inst.constraints):
        for q, w in _levels(c):
            obj[_p(i, q)] = w
    for u, f in enumerate(inst.auth.users):
        if isinstance(f, Consultant):
            obj[_z(u)] = CONSULTANT_IN_PENALTY
            for s in range(k):
                if not (f.A >> s) & 1:
                    obj[_x(s, u)] = CONSULTANT_OUT_PENALTY
        else:
            for s, w in _step_weights(f, k).items():
                obj[_x(s, u)] = w

    for s in range(k):
        m.rows.append(Row(f"assign_s{s}", [(_x(s, u), 1) for u in range(n)], "=", 1, "assign"))
    for i, c in enumerate(inst.constraints):
        lv = [q for q, _ in _levels(c)]
        ys = [(_y(i, u), 1) for u in range(n)]
        if c.kind is Kind.AT_MOST:
            m.rows.append(Row(f"atmost_c{i}", ys + [(_p(i, q), -1) for q in lv],
                              "<=", c.r, "count"))
            if order_rows:
                for q in lv[:-1]:
                    m.rows.append(Row(f"atmost_order_c{i}_q{q}",
                                      [(_p(i, q), 1), (_p(i, q + 1), -1)], ">=", 0, "order"))
        else:
            m.rows.append(Row(f"atleast_c{i}", ys + [(_p(i, q), 1) for q in lv],
                              ">=", c.r, "count"))
            if order_rows:
                for q in lv[:-1]:
                    m.rows.append(Row(f"atleast_order_c{i}_q{q}",
                                      [(_p(i, q), 1), (_p(i, q + 1), -1)], "<=", 0, "order"))
    for i, c in enumerate(inst.constraints):
        for u in range(n):
            if c.kind is Kind.AT_MOST:
                for s in c.scope:
                    m.rows.append(Row(f"atmost_y_c{i}_u{u}_s{s}",
                                      [(_y(i, u), 1), (_x(s, u), -1)], ">=", 0, "link"))
            else:
                m.rows.append(Row(f"atleast_y_c{i}_u{u}",
                                  [(_y(i, u), 1)] + [(_x(s, u), -1) for s in c.scope],
                                  "<=", 0, "link"))
    for u in consultants:
        a = inst.auth.users[u].A
        for s in range(k):
            if (a >> s) & 1:
                m.rows.append(Row(f"z_u{u}_s{s}", [(_z(u), 1), (_x(s, u), -1)], ">=", 0, "link"))
    return m


def export_mip(inst: WorkflowInstance) -> str:
    """LP-format text of the model."""
    m = build_mip(inst)
    return m.to_lp(f"valued WSP: k={inst.k} n={inst.n} constraints={len(inst.constraints)}")


def plan_values(inst: WorkflowInstance, plan: Plan) -> dict:
    """Cheapest feasible values of every model variable for a fixed plan."""
    if not plan.complete:
        raise MipError("incomplete plan")
    k, n = inst.k, inst.n
    vals = {_x(s, u): 0 for s in range(k) for u in range(n)}
    for s, u in enumerate(plan.assignment):
        vals[_x(s, u)] = 1
    for i, c in enumerate(inst.constraints):
        users = {plan[s] for s in c.scope}
        for u in range(n):
            vals[_y(i, u)] = 1 if u in users else 0
        q_used = len(users)
        for q, _ in _levels(c):
            if c.kind is Kind.AT_MOST:
                vals[_p(i, q)] = 1 if q <= q_used else 0
            else:
                vals[_p(i, q)] = 1 if q >= q_used else 0
    for u, f in enumerate(inst.auth.users):
        if isinstance(f, Consultant):
            vals[_z(u)] = 1 if any(plan[s] == u and (f.A >> s) & 1 for s in range(k)) else 0
    return vals


def check_plan_against_mip(inst: WorkflowInstance, plan: Plan,
                           model: Optional[MipModel] = None,
                           skip_groups: Iterable[str] = ()) -> int:
    """Objective of the model at the plan; raises ``MipError`` naming any violated row."""
    model = model or build_mip(inst)
    return model.evaluate(plan_values(inst, plan), skip_groups)
