import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vwsp.constraints import (ConstraintError, Kind, ScopeStats, WeightedConstraint, at_least,
                              at_most, constraint_weight_of_pattern, counting_lower_bound,
                              make_constraint, not_equals)

AT_MOST_3 = at_most(range(5), 3, {4: 5, 5: 10})
AT_LEAST_3 = at_least(range(5), 3, {1: 10**6, 2: 1})


def test_penalty_levels():
    assert AT_MOST_3.penalties == (0, 0, 0, 0, 5, 10)
    assert AT_LEAST_3.penalties == (0, 10**6, 1, 0, 0, 0)
    ne = not_equals(3, 1, 7)
    assert ne.scope == (1, 3) and ne.r == 2 and ne.penalties == (0, 7, 0)


def test_pattern_weights():
    # scope spread over four blocks
    assert constraint_weight_of_pattern(AT_MOST_3, [{0}, {1}, {2}, {3, 4}]) == 5
    assert constraint_weight_of_pattern(AT_LEAST_3, [{0, 1, 2}, {3, 4, 9}]) == 1
    assert constraint_weight_of_pattern(not_equals(0, 1, 10**6), [{0, 1}]) == 10**6
    assert constraint_weight_of_pattern(not_equals(0, 1, 10**6), [{0}, {1}]) == 0


def test_uncovered_scope_rejected():
    with pytest.raises(ConstraintError):
        constraint_weight_of_pattern(AT_MOST_3, [{0, 1}])


def test_bound_values_hand_evaluated():
    lb = lambda c, q, a: counting_lower_bound(c, ScopeStats(q, a))
    assert lb(AT_MOST_3, 5, 5) == 10
    assert lb(AT_MOST_3, 4, 4) == 5
    assert lb(AT_MOST_3, 2, 3) == 0
    assert lb(AT_LEAST_3, 1, 4) == 1
    assert lb(AT_LEAST_3, 0, 0) == 0
    assert lb(not_equals(0, 1, 9), 1, 2) == 9


def test_bound_rejects_inconsistent_stats():
    with pytest.raises(ConstraintError):
        counting_lower_bound(AT_MOST_3, ScopeStats(3, 2))
    with pytest.raises(ConstraintError):
        counting_lower_bound(AT_MOST_3, ScopeStats(1, 6))


@pytest.mark.parametrize("kind,scope,r,pen,msg", [
    ("at-most", [0, 1, 2], 1, {2: 3, 3: 1}, "level 3"),
    ("at-most", [0, 1, 2], 1, {1: 1, 2: 3, 3: 3}, "level 1"),
    ("at-most", [0, 1, 2], 1, {3: 3}, "level 2"),
    ("at-least", [0, 1, 2], 3, {1: 1, 2: 4}, "level 2"),
    ("at-least", [0, 1, 2], 2, {1: 1, 3: 1}, "level 3"),
    ("at-most", [0, 1], 3, {}, "threshold"),
    ("at-most", [0, 0, 1], 1, {2: 1}, "duplicate"),
    ("not-equals", [0, 1, 2], 2, {1: 1}, "two-step"),
    ("at-most", [0, 1], 1, {2: -1}, "negative"),
])
def test_invalid_tables(kind, scope, r, pen, msg):
    with pytest.raises(ConstraintError, match=msg):
        make_constraint(kind, scope, r, pen)


def test_level_zero_rejected():
    with pytest.raises(ConstraintError, match="level 0"):
        WeightedConstraint(Kind.AT_MOST, (0, 1), 1, (3, 0, 2))


def exhaustive_bound(c, q, a):
    """Cheapest final level over every way to place the remaining scope steps.

    ``q`` blocks already touch the scope.  Each of the ``t - a`` remaining
    steps either lands in a block that already touches the scope (level
    unchanged) or in one that does not (level + 1).  With ``q = 0`` the first
    step has no touching block to join.
    """
    t = c.size
    best = None
    for choice in itertools.product((0, 1), repeat=t - a):
        qq = q
        for fresh in choice:
            if fresh or qq == 0:
                qq += 1
        w = c.weight(qq)
        best = w if best is None else min(best, w)
    return best


def counting_tables(max_size=6, max_step=3):
    for t in range(2, max_size + 1):
        for r in range(1, t):
            for incs in itertools.product(range(max_step), repeat=t - r):
                if incs[0] == 0:
                    continue
                pen, cur = {}, 0
                for q, d in zip(range(r + 1, t + 1), incs):
                    cur += d
                    pen[q] = cur
                yield at_most(range(t), r, pen)
        for r in range(2, t + 1):
            for incs in itertools.product(range(max_step), repeat=r - 1):
                if incs[0] == 0:
                    continue
                pen, cur = {}, 0
                for q, d in zip(range(r - 1, 0, -1), incs):
                    cur += d
                    pen[q] = cur
                yield at_least(range(t), r, pen)


def test_bound_table_matches_exhaustive_small():
    checked = 0
    for c in counting_tables(max_size=4):
        for a in range(c.size + 1):
            for q in range(0 if a == 0 else 1, a + 1):
                assert c.bound_table()[q][a] == exhaustive_bound(c, q, a), (c, q, a)
                checked += 1
    assert checked > 100


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_bound_is_monotone_in_progress(data):
    t = data.draw(st.integers(2, 6))
    kind = data.draw(st.sampled_from(["at-most", "at-least"]))
    if kind == "at-most":
        r = data.draw(st.integers(1, t - 1))
        steps = data.draw(st.lists(st.integers(0, 5), min_size=t - r, max_size=t - r))
        steps[0] = max(steps[0], 1)
        pen = dict(zip(range(r + 1, t + 1), itertools.accumulate(steps)))
        c = at_most(range(t), r, pen)
    else:
        r = data.draw(st.integers(2, t))
        steps = data.draw(st.lists(st.integers(0, 5), min_size=r - 1, max_size=r - 1))
        steps[0] = max(steps[0], 1)
        pen = dict(zip(range(r - 1, 0, -1), itertools.accumulate(steps)))
        c = at_least(range(t), r, pen)
    tab = c.bound_table()
    # placing one more step can only narrow the reachable final levels
    for a in range(t):
        for q in range(0 if a == 0 else 1, a + 1):
            assert tab[q][a] <= tab[q + 1][a + 1]
            assert tab[q][a] <= tab[max(q, 1)][a + 1]
    assert min(c.penalties[1:]) == tab[0][0]
