"""Weighted set-authorisation ``omega(T, u)`` in closed per-user forms.

Step sets are passed around as integer bitmasks (bit ``s`` set means step
``s`` is in the set).  The public helpers also accept iterables of step
indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

EMPLOYEE_B_PENALTY = 10
EMPLOYEE_OUT_PENALTY = 10**6
CONSULTANT_IN_PENALTY = 20
CONSULTANT_OUT_PENALTY = 10**6

StepSet = Union[int, Iterable[int]]


class AuthorisationError(ValueError):
    pass


def to_mask(steps: StepSet) -> int:
    if isinstance(steps, int):
        return steps
    m = 0
    for s in steps:
        m |= 1 << s
    return m


def mask_steps(mask: int) -> list[int]:
    out = []
    s = 0
    while mask:
        if mask & 1:
            out.append(s)
        mask >>= 1
        s += 1
    return out


@dataclass(frozen=True)
class Additive:
    """``omega(T, u)`` is the sum of per-step weights."""

    weights: tuple[int, ...]
    form = "additive"

    def weight(self, mask: int) -> int:
        w = 0
        for s in mask_steps(mask):
            w += self.weights[s]
        return w

    def max_unit(self) -> int:
        return max(self.weights, default=0)


@dataclass(frozen=True)
class Employee:
    """Free on ``A``, 10 per step of ``B``, 10**6 per step outside both."""

    A: int
    B: int
    form = "employee"

    def weight(self, mask: int) -> int:
        return ((mask & self.B).bit_count() * EMPLOYEE_B_PENALTY
                + (mask & ~(self.A | self.B)).bit_count() * EMPLOYEE_OUT_PENALTY)

    def max_unit(self) -> int:
        return EMPLOYEE_OUT_PENALTY


@dataclass(frozen=True)
class Consultant:
    """A flat 20 for any work inside ``A`` plus 10**6 per step outside ``A``."""

    A: int
    form = "consultant"

    def weight(self, mask: int) -> int:
        if not mask:
            return 0
        out = (mask & ~self.A).bit_count() * CONSULTANT_OUT_PENALTY
        if mask & self.A:
            out += CONSULTANT_IN_PENALTY
        return out

    def max_unit(self) -> int:
        return CONSULTANT_OUT_PENALTY


@dataclass(frozen=True)
class Table:
    """Explicit weights for every non-empty step subset (tiny instances only)."""

    entries: Mapping[int, int]
    form = "table"

    def weight(self, mask: int) -> int:
        if not mask:
            return 0
        try:
            return self.entries[mask]
        except KeyError:
            raise AuthorisationError(f"table has no entry for steps {mask_steps(mask)}") from None

    def max_unit(self) -> int:
        return max(self.entries.values(), default=0)

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items())))


UserForm = Union[Additive, Employee, Consultant, Table]


class AuthorisationModel:
    """Per-user authorisation forms for ``n`` users over ``k`` steps."""

    def __init__(self, k: int, users: Sequence[UserForm]):
        self.k = k
        self.users = tuple(users)
        if not self.users:
            raise AuthorisationError("at least one user is required")
        for u, f in enumerate(self.users):
            _validate_form(f, k, u)

    @property
    def n(self) -> int:
        return len(self.users)

    def __eq__(self, other):
        return isinstance(other, AuthorisationModel) and (self.k, self.users) == (other.k, other.users)

    def __repr__(self):
        return f"AuthorisationModel(k={self.k}, n={self.n})"

    def weight_mask(self, mask: int, u: int) -> int:
        return self.users[u].weight(mask)

    def set_weight(self, steps: StepSet, u: int) -> int:
        mask = to_mask(steps)
        if mask >> self.k:
            raise AuthorisationError(f"steps {mask_steps(mask)} not all below k={self.k}")
        return self.users[u].weight(mask)

    def block_min_weight(self, steps: StepSet) -> tuple[int, int]:
        """Cheapest user for a non-empty step set, smallest index on ties."""
        mask = to_mask(steps)
        if not mask:
            raise AuthorisationError("block must be non-empty")
        best, arg = None, -1
        for u, f in enumerate(self.users):
            w = f.weight(mask)
            if best is None or w < best:
                best, arg = w, u
                if w == 0:
                    break
        return best, arg

    def authorisation_weight(self, assignment: Sequence[int]) -> int:
        """``sum_u omega(preimage(u), u)`` for a complete step -> user map."""
        pre: dict[int, int] = {}
        for s, u in enumerate(assignment):
            if u is None:
                raise AuthorisationError("incomplete plan")
            pre[u] = pre.get(u, 0) | (1 << s)
        return sum(self.users[u].weight(m) for u, m in pre.items())

    def max_unit_penalty(self) -> int:
        return max(f.max_unit() for f in self.users)

    @property
    def has_table(self) -> bool:
        return any(isinstance(f, Table) for f in self.users)


def set_weight(model: AuthorisationModel, steps: StepSet, u: int) -> int:
    return model.set_weight(steps, u)


def authorisation_weight(model: AuthorisationModel, assignment: Sequence[int]) -> int:
    return model.authorisation_weight(assignment)


def block_min_weight(model: AuthorisationModel, steps: StepSet) -> tuple[int, int]:
    return model.block_min_weight(steps)


def _validate_form(f: UserForm, k: int, u: int):
    full = (1 << k) - 1
    if isinstance(f, Additive):
        if len(f.weights) != k:
            raise AuthorisationError(f"user {u}: additive form needs {k} weights")
        if any(w < 0 for w in f.weights):
            raise AuthorisationError(f"user {u}: negative step weight")
    elif isinstance(f, Employee):
        if (f.A | f.B) & ~full:
            raise AuthorisationError(f"user {u}: step index out of range")
        if f.A & f.B:
            raise AuthorisationError(f"user {u}: A and B must be disjoint")
    elif isinstance(f, Consultant):
        if f.A & ~full:
            raise AuthorisationError(f"user {u}: step index out of range")
    elif isinstance(f, Table):
        if k > 16:
            raise AuthorisationError(f"user {u}: table form limited to k <= 16")
        ent = f.entries
        for m, w in ent.items():
            if m & ~full or m == 0 and w != 0:
                raise AuthorisationError(f"user {u}: bad table entry for {mask_steps(m)}")
            if w < 0:
                raise AuthorisationError(f"user {u}: negative table weight")
        for m in range(1, full + 1):
            if m not in ent:
                raise AuthorisationError(f"user {u}: table missing steps {mask_steps(m)}")
        # monotone: removing one step never increases the weight
        for m in range(1, full + 1):
            w = ent[m]
            sub = m
            while sub:
                low = sub & -sub
                smaller = m & ~low
                if smaller and ent[smaller] > w:
                    raise AuthorisationError(
                        f"user {u}: table not monotone at steps {mask_steps(m)}")
                sub &= sub - 1
    else:
        raise AuthorisationError(f"user {u}: unknown authorisation form {f!r}")


def table_from_function(k: int, fn) -> Table:
    """Tabulate ``fn(steps: frozenset) -> int`` over all non-empty subsets."""
    return Table({m: int(fn(frozenset(mask_steps(m)))) for m in range(1, 1 << k)})
