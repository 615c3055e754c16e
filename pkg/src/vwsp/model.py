"""Instances, plans, patterns and plan weights."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from .auth import AuthorisationModel, to_mask
from .constraints import WeightedConstraint

MAX_STEPS = 62
WEIGHT_CAP = 2**62


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class WorkflowInstance:
    k: int
    auth: AuthorisationModel
    constraints: tuple[WeightedConstraint, ...] = ()
    meta: Optional[Mapping] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        validate(self)

    @property
    def n(self) -> int:
        return self.auth.n

    @property
    def max_penalty(self) -> int:
        """Largest single penalty unit among constraint levels and authorisations."""
        m = self.auth.max_unit_penalty()
        for c in self.constraints:
            m = max(m, c.max_penalty)
        return m


def validate(inst: WorkflowInstance):
    if not 1 <= inst.k <= MAX_STEPS:
        raise InstanceError(f"k={inst.k} outside [1, {MAX_STEPS}]")
    if inst.auth.k != inst.k:
        raise InstanceError("authorisation model built for a different k")
    for i, c in enumerate(inst.constraints):
        if max(c.scope) >= inst.k:
            raise InstanceError(f"constraint {i}: scope step {max(c.scope)} >= k={inst.k}")
    if (len(inst.constraints) + inst.k + 1) * inst.max_penalty >= WEIGHT_CAP:
        raise InstanceError("penalties too large: total weight could reach 2^62")


@dataclass(frozen=True)
class Plan:
    """Step -> user map; ``None`` marks an unassigned step."""

    assignment: tuple[Optional[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(self.assignment))

    @classmethod
    def from_mapping(cls, k: int, mapping: Mapping[int, int]) -> "Plan":
        return cls(tuple(mapping.get(s) for s in range(k)))

    @property
    def k(self) -> int:
        return len(self.assignment)

    @property
    def complete(self) -> bool:
        return None not in self.assignment

    @property
    def domain(self) -> frozenset:
        return frozenset(s for s, u in enumerate(self.assignment) if u is not None)

    def __getitem__(self, s: int):
        return self.assignment[s]


@dataclass(frozen=True)
class Pattern:
    """Ordered partition of the covered steps into non-empty blocks."""

    blocks: tuple[frozenset, ...] = ()

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        seen: set = set()
        for b in blocks:
            if not b:
                raise ValueError("empty block")
            if seen & b:
                raise ValueError("blocks overlap")
            seen |= b
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Pattern":
        from .auth import mask_steps
        return cls(tuple(frozenset(mask_steps(m)) for m in masks))

    @property
    def covered(self) -> frozenset:
        return frozenset().union(*self.blocks)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(to_mask(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def is_complete(self, k: int) -> bool:
        return len(self.covered) == k

    def same_partition(self, other: "Pattern") -> bool:
        return set(self.blocks) == set(other.blocks)

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(f"s{s}" for s in sorted(b)) + "}"
                               for b in self.blocks) + "}"


def pattern_of(plan: Plan) -> Pattern:
    """Blocks of same-user steps, ordered by their smallest step."""
    if not plan.complete:
        raise ValueError("incomplete plan")
    by_user: dict = {}
    for s, u in enumerate(plan.assignment):
        by_user.setdefault(u, []).append(s)
    return Pattern(tuple(frozenset(b) for b in sorted(by_user.values(), key=min)))


def extend_pattern(p: Pattern, s: int) -> list[Pattern]:
    """All ``len(p) + 1`` ways to add step ``s``: each block in order, then alone."""
    if any(s in b for b in p.blocks):
        raise ValueError(f"step {s} already covered")
    children = []
    for i, b in enumerate(p.blocks):
        children.append(Pattern(p.blocks[:i] + (b | {s},) + p.blocks[i + 1:]))
    children.append(Pattern(p.blocks + (frozenset((s,)),)))
    return children


def enumerate_complete_patterns(k: int) -> Iterator[Pattern]:
    """Every partition of ``range(k)`` once, in restricted-growth order."""
    if k < 1:
        raise ValueError("k must be >= 1")

    # growth[s] is the block index of step s; it never exceeds 1 + max so far
    growth = [0] * k

    def rec(s: int, nblocks: int):
        if s == k:
            blocks = [[] for _ in range(nblocks)]
            for t, b in enumerate(growth):
                blocks[b].append(t)
            yield Pattern(tuple(frozenset(b) for b in blocks))
            return
        for b in range(nblocks + 1):
            growth[s] = b
            yield from rec(s + 1, max(nblocks, b + 1))

    yield from rec(0, 0)


def constraint_weight(inst: WorkflowInstance, plan: Plan) -> int:
    if not plan.complete:
        raise ValueError("incomplete plan")
    a = plan.assignment
    return sum(c.penalties[len({a[s] for s in c.scope})] for c in inst.constraints)


def authorisation_weight(inst: WorkflowInstance, plan: Plan) -> int:
    if not plan.complete:
        raise ValueError("incomplete plan")
    return inst.auth.authorisation_weight(plan.assignment)


def total_weight(inst: WorkflowInstance, plan: Plan) -> int:
    """``w_C + w_A`` for a complete plan."""
    if plan.k != inst.k:
        raise ValueError(f"plan covers {plan.k} steps, instance has {inst.k}")
    if any(u is not None and not 0 <= u < inst.n for u in plan.assignment):
        raise ValueError("plan uses an unknown user")
    w = constraint_weight(inst, plan) + authorisation_weight(inst, plan)
    if w >= WEIGHT_CAP:
        raise InstanceError("weight overflow")
    return w


def pattern_constraint_weight(inst: WorkflowInstance, p: Pattern) -> int:
    masks = p.masks
    return sum(c.weight_of_pattern(masks) for c in inst.constraints)


def pattern_lower_bound(inst: WorkflowInstance, p: Pattern) -> int:
    """Sum of per-constraint counting bounds plus the cheapest user per block.

    Never exceeds the weight of a complete plan whose pattern extends ``p``.
    """
    masks = p.masks
    lb = 0
    for c in inst.constraints:
        lb += c.lower_bound(c.stats(masks))
    for m in masks:
        lb += inst.auth.block_min_weight(m)[0]
    return lb
