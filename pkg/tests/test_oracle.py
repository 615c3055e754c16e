import itertools
import random

import numpy as np
import pytest

from vwsp import Additive, AuthorisationModel, Plan, WorkflowInstance, not_equals, total_weight
from vwsp.oracle import (OracleTooLarge, best_completion, bell, enumerate_plans,
                         oracle_by_patterns, oracle_by_plans, plan_weights)

from instances import all_plans, random_instance


def free(k, n):
    return AuthorisationModel(k, [Additive((0,) * k)] * n)


def test_bell_numbers():
    assert [bell(k) for k in range(8)] == [1, 1, 2, 5, 15, 52, 203, 877]


def test_two_users_one_not_equals():
    inst = WorkflowInstance(2, free(2, 2), (not_equals(0, 1, 5),))
    res = oracle_by_plans(inst)
    assert res.weight == 0 and res.optimal_count == 2 and res.evaluated == 4


def test_single_step():
    inst = WorkflowInstance(1, AuthorisationModel(1, [Additive((7,)), Additive((2,))]))
    assert oracle_by_plans(inst).weight == 2 == oracle_by_patterns(inst).weight


def test_pattern_oracle_counts_patterns():
    inst = WorkflowInstance(3, free(3, 3))
    res = oracle_by_patterns(inst)
    assert res.evaluated == 5 and res.optimal_count == 5 and res.weight == 0


def test_enumerate_plans_digits():
    plans = enumerate_plans(3, 2, 0, 8)
    assert [tuple(r) for r in plans] == [(a, b, c) for c in (0, 1) for b in (0, 1)
                                         for a in (0, 1)]


def test_vectorised_weights_match_scalar():
    rng = random.Random(2)
    for _ in range(30):
        k, n = rng.randint(1, 5), rng.randint(1, 4)
        inst = random_instance(rng, k, n)
        plans = np.array(list(all_plans(k, n)), dtype=np.int64)
        w = plan_weights(inst, plans)
        for row, x in zip(plans, w):
            assert int(x) == total_weight(inst, Plan(tuple(int(u) for u in row)))


def test_oracles_agree():
    rng = random.Random(3)
    for _ in range(60):
        k, n = rng.randint(1, 6), rng.randint(1, 5)
        inst = random_instance(rng, k, n)
        a, b = oracle_by_plans(inst), oracle_by_patterns(inst)
        assert a.weight == b.weight
        assert total_weight(inst, a.plan) == total_weight(inst, b.plan) == a.weight


def test_best_completion_by_hand():
    inst = WorkflowInstance(3, free(3, 2), (not_equals(0, 1, 4), not_equals(1, 2, 6)))
    assert best_completion(inst, [{0, 1}]) == 4
    assert best_completion(inst, [{0}, {1}]) == 0
    # three separate blocks need three users
    assert best_completion(inst, [{0}, {1}, {2}]) is None


def test_best_completion_matches_plan_scan():
    rng = random.Random(4)
    for _ in range(20):
        k, n = rng.randint(2, 5), rng.randint(1, 4)
        inst = random_instance(rng, k, n)
        covered = rng.sample(range(k), rng.randint(1, k))
        blocks = {}
        for s in covered:
            blocks.setdefault(rng.randrange(3), set()).add(s)
        blocks = list(blocks.values())
        want = None
        for a in itertools.product(range(n), repeat=k):
            ok = all((a[s] == a[t]) == any(s in b and t in b for b in blocks)
                     for s in covered for t in covered if s < t)
            if ok:
                w = total_weight(inst, Plan(a))
                want = w if want is None else min(want, w)
        assert best_completion(inst, blocks) == want


def test_limits():
    inst = WorkflowInstance(8, free(8, 12))
    with pytest.raises(OracleTooLarge):
        oracle_by_plans(inst)
    with pytest.raises(OracleTooLarge):
        oracle_by_patterns(WorkflowInstance(12, free(12, 1)))
