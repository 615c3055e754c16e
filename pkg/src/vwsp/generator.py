"""Seeded pseudo-random benchmark instances.

All draws come from one SplitMix64 stream in a fixed order, so a parameter
set maps to the same instance on every platform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .auth import AuthorisationModel, Consultant, Employee, to_mask
from .constraints import at_least, at_most, not_equals
from .model import WorkflowInstance

MASK64 = (1 << 64) - 1

NOT_EQUALS_PENALTY = 10**6
AT_MOST_PENALTIES = {4: 5, 5: 10}
AT_LEAST_PENALTIES = {1: 10**6, 2: 1}
COUNTING_SCOPE = 5
COUNTING_R = 3
CONSULTANTS = 10


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` by rejection sampling."""
        span = hi - lo + 1
        if span <= 0:
            raise ValueError(f"empty range [{lo}, {hi}]")
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next()
            if x < limit:
                return lo + x % span

    def sample(self, items: list, j: int) -> list:
        """Uniform ``j``-subset by partial Fisher-Yates, returned sorted."""
        arr = list(items)
        if j > len(arr):
            raise ValueError("sample larger than population")
        for i in range(j):
            r = self.uniform(i, len(arr) - 1)
            arr[i], arr[r] = arr[r], arr[i]
        return sorted(arr[:j])


@dataclass(frozen=True)
class GeneratorParams:
    k: int
    d: float
    alpha: float
    seed: int

    def validate(self):
        if self.k < 5:
            raise ValueError("k must be >= 5 (employee |A| range and 5-step scopes)")
        if not 0 <= self.d <= 1:
            raise ValueError("density d must lie in [0, 1]")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def not_equals_count(self) -> int:
        d = Fraction(str(self.d))
        return math.floor((d * self.k * (self.k - 1) + 1) / 2)

    @property
    def counting_count(self) -> int:
        # alpha * k rounded half up
        return math.floor(Fraction(str(self.alpha)) * self.k + Fraction(1, 2))

    @property
    def users(self) -> int:
        return 10 * self.k + CONSULTANTS


def generate(params: GeneratorParams) -> WorkflowInstance:
    params.validate()
    k = params.k
    rng = SplitMix64(params.seed)
    steps = list(range(k))

    users = []
    for _ in range(10 * k):
        a = rng.sample(steps, rng.uniform(1, math.ceil((k - 4) / 2)))
        taken = set(a)
        rest = [s for s in steps if s not in taken]
        b = rng.sample(rest, 2)
        users.append(Employee(to_mask(a), to_mask(b)))
    for _ in range(CONSULTANTS):
        a = rng.sample(steps, rng.uniform(1, math.ceil(k / 4)))
        users.append(Consultant(to_mask(a)))

    constraints = []
    seen = set()
    while len(seen) < params.not_equals_count:
        pair = tuple(rng.sample(steps, 2))
        if pair in seen:
            continue
        seen.add(pair)
        constraints.append(not_equals(pair[0], pair[1], NOT_EQUALS_PENALTY))
    m = params.counting_count
    for _ in range(m):
        constraints.append(at_most(rng.sample(steps, COUNTING_SCOPE), COUNTING_R,
                                   AT_MOST_PENALTIES))
    for _ in range(m):
        constraints.append(at_least(rng.sample(steps, COUNTING_SCOPE), COUNTING_R,
                                    AT_LEAST_PENALTIES))

    meta = {"generator": {"k": k, "d": params.d, "alpha": params.alpha, "seed": params.seed}}
    return WorkflowInstance(k, AuthorisationModel(k, users), tuple(constraints), meta=meta)
