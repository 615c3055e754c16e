"""Weighted user-independent counting constraints.

Every constraint is evaluated through the number ``q`` of distinct users
(equivalently, pattern blocks) that touch its scope.  Not-equals is kept as
its own kind but is evaluated as at-least-2.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class ConstraintError(ValueError):
    pass


class Kind(str, enum.Enum):
    NOT_EQUALS = "not-equals"
    AT_MOST = "at-most"
    AT_LEAST = "at-least"


@dataclass(frozen=True)
class ScopeStats:
    """Blocks touching the scope (``q``) and scope steps already placed (``a``)."""

    q: int
    a: int


@dataclass(frozen=True)
class WeightedConstraint:
    kind: Kind
    scope: tuple[int, ...]
    r: int
    # penalties[q] for q in 0..|scope|; penalties[0] is unused and kept at 0
    penalties: tuple[int, ...]
    _bounds: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        scope = tuple(sorted(set(self.scope)))
        if len(scope) != len(self.scope):
            raise ConstraintError(f"duplicate steps in scope {list(self.scope)}")
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "kind", Kind(self.kind))
        self._validate()
        object.__setattr__(self, "_bounds", _bound_table(self.penalties))

    @property
    def size(self) -> int:
        return len(self.scope)

    @property
    def scope_mask(self) -> int:
        m = 0
        for s in self.scope:
            m |= 1 << s
        return m

    @property
    def max_penalty(self) -> int:
        return max(self.penalties)

    def weight(self, q: int) -> int:
        """Penalty for ``q`` distinct users on the scope."""
        return self.penalties[q]

    def lower_bound(self, stats: ScopeStats) -> int:
        return self._bounds[stats.q][stats.a]

    def bound_table(self) -> tuple[tuple[int, ...], ...]:
        """``table[q][a]`` for all consistent ``0 <= q <= a <= size``."""
        return self._bounds

    def stats(self, blocks: Iterable[int]) -> ScopeStats:
        """Scope statistics of a pattern given as block bitmasks."""
        sm = self.scope_mask
        q = a = 0
        for b in blocks:
            hit = b & sm
            if hit:
                q += 1
                a += hit.bit_count()
        return ScopeStats(q, a)

    def weight_of_pattern(self, blocks: Iterable[int]) -> int:
        st = self.stats(blocks)
        if st.a != self.size:
            raise ConstraintError("pattern does not cover the constraint scope")
        return self.penalties[st.q]

    def _validate(self):
        t = len(self.scope)
        if t == 0:
            raise ConstraintError("empty scope")
        if min(self.scope) < 0:
            raise ConstraintError("negative step index in scope")
        if len(self.penalties) != t + 1:
            raise ConstraintError(f"penalty table must cover levels 1..{t}")
        pen = self.penalties
        if any(p < 0 for p in pen):
            raise ConstraintError("negative penalty")
        if pen[0] != 0:
            raise ConstraintError("level 0 is not a valid penalty level")
        if not 1 <= self.r <= t:
            raise ConstraintError(f"threshold r={self.r} outside [1, {t}]")
        if self.kind is Kind.NOT_EQUALS and (t != 2 or self.r != 2):
            raise ConstraintError("not-equals needs a two-step scope and r=2")
        if self.kind is Kind.AT_MOST:
            for q in range(1, t + 1):
                if q <= self.r and pen[q] != 0:
                    raise ConstraintError(f"level {q}: at-most-{self.r} must not penalise q <= r")
                if q > self.r and pen[q] <= 0:
                    raise ConstraintError(f"level {q}: at-most-{self.r} must penalise q > r")
                if q > self.r + 1 and pen[q] < pen[q - 1]:
                    raise ConstraintError(f"level {q}: penalties must not decrease with q")
        else:
            for q in range(1, t + 1):
                if q >= self.r and pen[q] != 0:
                    raise ConstraintError(f"level {q}: at-least-{self.r} must not penalise q >= r")
                if q < self.r and pen[q] <= 0:
                    raise ConstraintError(f"level {q}: at-least-{self.r} must penalise q < r")
                if 1 < q < self.r and pen[q] > pen[q - 1]:
                    raise ConstraintError(f"level {q}: penalties must not increase with q")


def _bound_table(penalties: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    # l(q, a) = w(q) at a = t, else min(l(q, a+1), l(q+1, a+1)).  With q = 0 no
    # block touches the scope yet, so the next scope step always opens one.
    t = len(penalties) - 1
    inf = None
    table = [[inf] * (t + 1) for _ in range(t + 2)]
    for q in range(t + 1):
        table[q][t] = penalties[q] if q >= 1 else inf
    for a in range(t - 1, -1, -1):
        for q in range(0, a + 1):
            grow = table[q + 1][a + 1]
            if q == 0:
                table[q][a] = grow
            else:
                stay = table[q][a + 1]
                table[q][a] = min(stay, grow)
    return tuple(tuple(0 if v is None else v for v in row) for row in table[: t + 1])


def _table_from_mapping(size: int, penalties: Mapping[int, int]) -> tuple[int, ...]:
    pen = [0] * (size + 1)
    for q, w in penalties.items():
        q = int(q)
        if not 1 <= q <= size:
            raise ConstraintError(f"penalty level {q} outside [1, {size}]")
        pen[q] = int(w)
    return tuple(pen)


def not_equals(s: int, t: int, penalty: int) -> WeightedConstraint:
    return WeightedConstraint(Kind.NOT_EQUALS, (s, t), 2, (0, penalty, 0))


def at_most(scope: Sequence[int], r: int, penalties: Mapping[int, int]) -> WeightedConstraint:
    return WeightedConstraint(Kind.AT_MOST, tuple(scope), r,
                              _table_from_mapping(len(scope), penalties))


def at_least(scope: Sequence[int], r: int, penalties: Mapping[int, int]) -> WeightedConstraint:
    return WeightedConstraint(Kind.AT_LEAST, tuple(scope), r,
                              _table_from_mapping(len(scope), penalties))


def make_constraint(kind, scope, r, penalties: Mapping[int, int]) -> WeightedConstraint:
    kind = Kind(kind)
    return WeightedConstraint(kind, tuple(scope), r,
                              _table_from_mapping(len(scope), penalties))


def counting_lower_bound(c: WeightedConstraint, stats: ScopeStats) -> int:
    """Lower bound on the constraint's weight over all completions."""
    if not 0 <= stats.q <= stats.a <= c.size or (stats.a > 0) != (stats.q > 0):
        raise ConstraintError(f"inconsistent scope statistics {stats}")
    return c.lower_bound(stats)


def constraint_weight_of_pattern(c: WeightedConstraint, blocks: Iterable) -> int:
    """Weight of ``c`` on a complete pattern; blocks may be masks or step sets."""
    return c.weight_of_pattern(_as_masks(blocks))


def _as_masks(blocks: Iterable) -> list[int]:
    out = []
    for b in blocks:
        if isinstance(b, int):
            out.append(b)
        else:
            m = 0
            for s in b:
                m |= 1 << s
            out.append(m)
    return out
