from __future__ import annotations

import itertools
import json
import random

import numpy as np
import pytest

from ilpls.boundary_oracle import (
    Box,
    BudgetError,
    EmptyFeasible,
    boundary_grid,
    check_fact1_fact2,
    check_fact3,
    check_fact4,
    check_facts,
    check_prop1,
    check_prop2,
    check_prop3,
    check_prop4,
    dump_counterexamples,
    enumerate_feasible,
    is_boundary,
    random_instance,
    random_point,
)
from ilpls.engine import Params
from ilpls.model import Constraint, Instance
from ilpls.verify import off_by_one_tm, prop2_suite, run_suites

import oracles


def pairs_le_one(cost=(0, 0)):
    return Instance(2, [Constraint([(0, 1), (1, 1)], 1)], list(cost), [0, 0], [1, 1])


def test_enumerate_feasible_examples():
    pts = {tuple(p) for p in enumerate_feasible(pairs_le_one(), Box((0, 0), (1, 1)))}
    assert pts == {(0, 0), (0, 1), (1, 0)}
    contradictory = Instance(1, [Constraint([(0, 1)], 0), Constraint([(0, -1)], -1)], [0], [0], [3])
    assert len(enumerate_feasible(contradictory, Box((0,), (3,)))) == 0
    free = Instance(2, [], [0, 0], [0, 0], [1, 1])
    assert len(enumerate_feasible(free, Box((0, 0), (1, 1)))) == 4


def test_enumeration_budget():
    inst = Instance(8, [], [1] * 8, [0] * 8, [20] * 8)
    with pytest.raises(BudgetError):
        enumerate_feasible(inst, Box.from_bounds(inst))


def test_is_boundary_examples():
    assert all(is_boundary(pairs_le_one(), p) for p in [(0, 0), (0, 1), (1, 0)])
    line = Instance(1, [], [1], [0], [10])
    assert not is_boundary(line, [5])
    assert is_boundary(line, [10])
    assert not is_boundary(pairs_le_one(), [1, 1])


def test_grid_matches_pointwise_definition():
    """The vectorized grid and the pure Python definition agree point by point."""
    rng = random.Random(21)
    for _ in range(60):
        inst = random_instance(rng, n_max=3, m_max=4, bound=4)
        box = Box.from_bounds(inst)
        origin, feas, bnd = boundary_grid(inst, box)
        for x in itertools.product(*[range(l, h + 1) for l, h in zip(box.lo, box.hi)]):
            k = tuple(np.array(x) - origin)
            assert feas[k] == oracles.feasible(inst, x)
            assert bnd[k] == is_boundary(inst, x)


def test_prop1_examples():
    v = check_prop1(pairs_le_one((-1, -1)), Box((0, 0), (1, 1)))
    assert v.passed and v.checked == 1
    v = check_prop1(pairs_le_one((0, 0)), Box((0, 0), (1, 1)))
    assert v.skipped == 1 and v.checked == 0
    empty = Instance(1, [Constraint([(0, 1)], 0), Constraint([(0, -1)], -1)], [1], [0], [3])
    with pytest.raises(EmptyFeasible):
        check_prop1(empty, Box((0,), (3,)))


def test_prop1_randomized_family():
    rng = random.Random(8)
    for _ in range(40):
        inst = random_instance(rng, n_max=3)
        assert check_prop1(inst, Box.from_bounds(inst)).passed


def test_prop2_catches_off_by_one():
    # 2x <= 6 from x=0: tm goes to 3 (tight); the mutant stops at 2, an interior point.
    inst = Instance(1, [Constraint([(0, 2)], 6)], [1], [-10], [10])
    assert check_prop2(inst, [0], 0, 0).passed
    bad = check_prop2(inst, [0], 0, 0, step=off_by_one_tm)
    assert not bad.passed and bad.violations[0]["point"] == [2]
    assert not prop2_suite(200, seed=3, step=off_by_one_tm).passed


def test_prop3_on_lift():
    inst = Instance(2, [Constraint([(0, 1), (1, 1)], 3)], [-1, 0], [0, 0], [5, 5])
    v = check_prop3(inst, [1, 0], 0)
    assert v.passed and v.checked == 1
    assert check_prop3(inst, [4, 4], 0).skipped == 1  # infeasible start


def test_prop4_small_run():
    rng = random.Random(2)
    inst = random_instance(rng, n_max=4)
    v = check_prop4(inst, Params(step_limit=2000, seed=3))
    assert v.passed and v.checked > 0


def test_fact1_fact2_example():
    inst = Instance(2, [Constraint([(0, 1)], 3)], [1, 0], [0, 0], [5, 5])
    f1, f2 = check_fact1_fact2(inst, (0, 0), (3, 0))
    assert f1.passed and f2.passed and f1.checked == 1
    f1, _ = check_fact1_fact2(inst, (0, 0), (3, 1))  # not axis aligned
    assert f1.skipped == 1


def test_fact4_binary():
    rng = random.Random(4)
    for _ in range(30):
        inst = random_instance(rng, n_max=6, binary=True)
        assert check_fact4(inst, Box.from_bounds(inst)).passed


def test_fact3_counterexample_triangle():
    """y <= 2x, x <= 2y, x + y <= 3: (1,1) is a boundary point but the centroid of
    the other three integer points, so no nonzero linear objective singles it out."""
    rows = [Constraint([(0, -2), (1, 1)], 0), Constraint([(0, 1), (1, -2)], 0),
            Constraint([(0, 1), (1, 1)], 3)]
    inst = Instance(2, rows, [1, 1], [-3, -3], [3, 3])
    pts = {tuple(p) for p in enumerate_feasible(inst, Box.from_bounds(inst))}
    assert pts == {(0, 0), (1, 1), (2, 1), (1, 2)}
    assert is_boundary(inst, (1, 1))
    others = np.array([(0, 0), (2, 1), (1, 2)])
    assert (others.mean(axis=0) == (1, 1)).all()
    v = check_fact3(inst, Box.from_bounds(inst))
    assert not v.passed
    assert any(cx["point"] == [1, 1] for cx in v.violations)


def test_check_facts_bundle():
    rng = random.Random(6)
    inst = random_instance(rng, n_max=3, binary=True)
    names = [v.name for v in check_facts(inst, Box.from_bounds(inst), rng, pairs=3)]
    assert names == ["fact1", "fact2", "fact3", "fact4"]


def test_counterexample_dump_is_json():
    inst = Instance(1, [Constraint([(0, 2)], 6)], [1], [-10], [10])
    bad = check_prop2(inst, [0], 0, 0, step=off_by_one_tm)
    doc = json.loads(dump_counterexamples([bad]))
    assert doc[0]["check"] == "prop2"


def test_run_suites_filters():
    out = run_suites(props=(2,), facts=(), scale=0.05)
    assert [v.name for v in out] == ["prop2"]


def test_random_instances_are_feasible():
    rng = random.Random(0)
    for _ in range(50):
        inst = random_instance(rng)
        assert len(enumerate_feasible(inst, Box.from_bounds(inst))) > 0
        assert any(inst.cost)
        x = random_point(rng, inst)
        assert all(lo <= v <= hi for v, lo, hi in zip(x, inst.lower, inst.upper))
