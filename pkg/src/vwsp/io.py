"""Instance files: JSON text with one user / constraint record per line.

::

    {
     "k": 3,
     "n": 2,
     "authorisations": [
      {"form":"employee","A":[0],"B":[1,2]},
      {"form":"consultant","A":[2]}
     ],
     "constraints": [
      {"type":"not-equals","scope":[0,1],"r":2,"penalties":{"1":1000000}},
      {"type":"at-most","scope":[0,1,2],"r":1,"penalties":{"2":5,"3":10}}
     ],
     "meta": {...}
    }

Levels missing from ``penalties`` default to 0.  Other user forms are
``{"form":"additive","weights":[w_0, ..., w_{k-1}]}`` and
``{"form":"table","entries":[{"steps":[...],"weight":w}, ...]}``.  An
``edges`` array (step ordering) is accepted and ignored.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .auth import (Additive, AuthorisationError, AuthorisationModel, Consultant, Employee,
                   Table, mask_steps, to_mask)
from .constraints import ConstraintError, Kind, make_constraint
from .model import InstanceError, Plan, WorkflowInstance

KNOWN_KEYS = {"k", "n", "authorisations", "constraints", "edges", "meta"}


class FormatError(ValueError):
    """Malformed instance file; the message names the offending location."""


def _need(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    if key not in obj:
        raise FormatError(f"{where}: missing field '{key}'")
    return obj[key]


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormatError(f"{where}: expected an integer, got {v!r}")
    return v


def _steps(v, k: int, where: str) -> list[int]:
    if not isinstance(v, list):
        raise FormatError(f"{where}: expected a list of step indices")
    out = [_int(s, f"{where}[{i}]") for i, s in enumerate(v)]
    for i, s in enumerate(out):
        if not 0 <= s < k:
            raise FormatError(f"{where}[{i}]: step {s} outside [0, {k})")
    if len(set(out)) != len(out):
        raise FormatError(f"{where}: duplicate steps")
    return out


def _user(rec: Any, k: int, where: str):
    form = _need(rec, "form", where)
    if form == "additive":
        w = _need(rec, "weights", where)
        if not isinstance(w, list) or len(w) != k:
            raise FormatError(f"{where}.weights: expected {k} integers")
        return Additive(tuple(_int(x, f"{where}.weights[{i}]") for i, x in enumerate(w)))
    if form == "employee":
        return Employee(to_mask(_steps(_need(rec, "A", where), k, f"{where}.A")),
                        to_mask(_steps(_need(rec, "B", where), k, f"{where}.B")))
    if form == "consultant":
        return Consultant(to_mask(_steps(_need(rec, "A", where), k, f"{where}.A")))
    if form == "table":
        entries = {}
        raw = _need(rec, "entries", where)
        if not isinstance(raw, list):
            raise FormatError(f"{where}.entries: expected a list")
        for i, e in enumerate(raw):
            w = f"{where}.entries[{i}]"
            m = to_mask(_steps(_need(e, "steps", w), k, f"{w}.steps"))
            entries[m] = _int(_need(e, "weight", w), f"{w}.weight")
        return Table(entries)
    raise FormatError(f"{where}.form: unknown authorisation form {form!r}")


def _constraint(rec: Any, k: int, where: str):
    kind = _need(rec, "type", where)
    try:
        kind = Kind(kind)
    except ValueError:
        raise FormatError(f"{where}.type: unknown constraint type {kind!r}") from None
    scope = _steps(_need(rec, "scope", where), k, f"{where}.scope")
    r = _int(rec.get("r", 2 if kind is Kind.NOT_EQUALS else None), f"{where}.r")
    pen = _need(rec, "penalties", where)
    if not isinstance(pen, dict):
        raise FormatError(f"{where}.penalties: expected a level -> weight object")
    levels = {}
    for q, w in pen.items():
        try:
            lvl = int(q)
        except ValueError:
            raise FormatError(f"{where}.penalties: level {q!r} is not an integer") from None
        levels[lvl] = _int(w, f"{where}.penalties[{q}]")
    try:
        return make_constraint(kind, scope, r, levels)
    except ConstraintError as e:
        raise FormatError(f"{where}: {e}") from None


def parse_instance(text: str) -> WorkflowInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError("top level: expected an object")
    extra = set(doc) - KNOWN_KEYS
    if extra:
        raise FormatError(f"top level: unknown fields {sorted(extra)}")
    k = _int(_need(doc, "k", "top level"), "k")
    if k < 1:
        raise FormatError("k: must be >= 1")
    recs = _need(doc, "authorisations", "top level")
    if not isinstance(recs, list):
        raise FormatError("authorisations: expected a list")
    users = [_user(r, k, f"authorisations[{i}]") for i, r in enumerate(recs)]
    if "n" in doc and _int(doc["n"], "n") != len(users):
        raise FormatError(f"n: says {doc['n']} users but {len(users)} are listed")
    crecs = doc.get("constraints", [])
    if not isinstance(crecs, list):
        raise FormatError("constraints: expected a list")
    cons = [_constraint(r, k, f"constraints[{i}]") for i, r in enumerate(crecs)]
    try:
        return WorkflowInstance(k, AuthorisationModel(k, users), tuple(cons), meta=doc.get("meta"))
    except (AuthorisationError, InstanceError) as e:
        raise FormatError(str(e)) from None


def load_instance(path: Union[str, Path]) -> WorkflowInstance:
    return parse_instance(Path(path).read_text())


def _compact(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _user_record(f) -> dict:
    if isinstance(f, Additive):
        return {"form": "additive", "weights": list(f.weights)}
    if isinstance(f, Employee):
        return {"form": "employee", "A": mask_steps(f.A), "B": mask_steps(f.B)}
    if isinstance(f, Consultant):
        return {"form": "consultant", "A": mask_steps(f.A)}
    return {"form": "table", "entries": [{"steps": mask_steps(m), "weight": w}
                                         for m, w in sorted(f.entries.items()) if m]}


def _constraint_record(c) -> dict:
    return {"type": c.kind.value, "scope": list(c.scope), "r": c.r,
            "penalties": {str(q): c.penalties[q] for q in range(1, c.size + 1)
                          if c.penalties[q]}}


def dump_instance(inst: WorkflowInstance) -> str:
    """Deterministic text form; equal instances give byte-identical output."""
    lines = ["{", f' "k": {inst.k},', f' "n": {inst.n},', ' "authorisations": [']
    users = [" " + _compact(_user_record(f)) for f in inst.auth.users]
    lines.append(",\n".join(users))
    lines.append(" ],")
    lines.append(' "constraints": [')
    cons = [" " + _compact(_constraint_record(c)) for c in inst.constraints]
    if cons:
        lines.append(",\n".join(cons))
    if inst.meta is not None:
        lines.append(" ],")
        lines.append(' "meta": ' + json.dumps(inst.meta, sort_keys=True))
    else:
        lines.append(" ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_instance(inst: WorkflowInstance, path: Union[str, Path]):
    Path(path).write_text(dump_instance(inst))


def plan_record(plan: Plan) -> list:
    return list(plan.assignment)
