from __future__ import annotations

import json
import random

import pytest

from ilpls.engine import (
    Mode,
    OpKind,
    Params,
    SearchState,
    initialize,
    run,
)
from ilpls.model import INF, Constraint, Instance, is_feasible

import oracles


def knapsack():
    # max 3x1 + 4x2, 2x1 + 3x2 <= 6, binary; internal min -3x1 - 4x2
    return Instance(2, [Constraint([(0, 2), (1, 3)], 6)], [-3, -4], [0, 0], [1, 1], maximize=True)


def test_initialize():
    inst = Instance(3, [], [0, 0, 0], [2, -5, -3], [5, -1, 4])
    assert initialize(inst) == [2, -1, 0]


def test_params_validation():
    with pytest.raises(ValueError):
        Params(beta=2)
    with pytest.raises(ValueError):
        Params(unit_move="huge")
    with pytest.raises(ValueError):
        Params(time_limit=0)
    with pytest.raises(ValueError):
        run(knapsack(), Params())  # no budget at all


def test_search_step_satisfies_single_row():
    inst = Instance(1, [Constraint([(0, 2)], 2)], [0], [0], [5])
    st = SearchState(inst, Params(step_limit=10))
    st.sol.assign([3])
    st.mode = Mode.SEARCH
    st.search_step()
    assert st.sol.values == [1] and st.sol.feasible
    # reverse (increase) is now tabu for 3..12 steps
    assert 3 <= st.tabu_inc[0] - st.step <= 12


def test_search_step_fallback_bumps_weights():
    # x1 + x2 <= 0 and -x1 - x2 <= -1 cannot both hold: every op trades one for the other
    rows = [Constraint([(0, 1), (1, 1)], 0), Constraint([(0, -1), (1, -1)], -1)]
    inst = Instance(2, rows, [0, 0], [0, 0], [3, 3])
    st = SearchState(inst, Params(step_limit=10, sp=0.0))
    st.sol.assign([0, 0])
    before = list(st.weights.con_weights)
    st.search_step()
    assert st.counters["weight_updates"] == 1
    assert st.weights.con_weights[1] == before[1] + 1


def test_tabu_excludes_reverse_move():
    inst = Instance(1, [Constraint([(0, 2)], 2)], [0], [0], [5])
    st = SearchState(inst, Params(step_limit=10))
    st.sol.assign([3])
    st.step = 5
    st.tabu_dec[0] = 7   # decrease applied 2 steps ago with tenure 4
    cands = []
    st._row_candidates(0, cands)
    assert cands == []
    st.step = 8
    st._row_candidates(0, cands)
    assert cands == [(0, -2)]


def test_improve_step_lifts():
    inst = Instance(2, [Constraint([(0, 1), (1, 1)], 3)], [-1, 0], [0, 0], [10, 10])
    st = SearchState(inst, Params(step_limit=10))
    st.sol.assign([1, 0])
    st.best, st.best_obj = [1, 0], -1
    st.improve_step()
    assert st.sol.values == [3, 0]
    assert st.sol.objective == -3


def test_improve_step_detects_optimum():
    inst = Instance(2, [], [-1, 2], [0, 0], [4, 4])
    st = SearchState(inst, Params(step_limit=10))
    st.sol.assign([4, 0])
    st.best, st.best_obj = [4, 0], -4
    st.improve_step()
    assert st.finished


def test_unit_move_when_no_lift():
    # x1 <= 2 tight, so no lift; the unit move pushes x1 to 3 and breaks the row
    inst = Instance(1, [Constraint([(0, 1)], 2)], [-1], [0], [5])
    st = SearchState(inst, Params(step_limit=10))
    st.sol.assign([2])
    st.best, st.best_obj = [2], -2
    st.improve_step()
    assert st.sol.values == [3] and not st.sol.feasible
    assert st.current_mode() is Mode.RESTORE


@pytest.mark.parametrize("variant,expected", [("unit", 3), ("bound", 5)])
def test_unit_move_variants(variant, expected):
    inst = Instance(1, [Constraint([(0, 1)], 2)], [-1], [0], [5])
    st = SearchState(inst, Params(step_limit=10, unit_move=variant))
    st.sol.assign([2])
    st.best, st.best_obj = [2], -2
    st.improve_step()
    assert st.sol.values == [expected]


def test_restore_step_repairs_violation():
    inst = Instance(1, [Constraint([(0, 1)], 2)], [-1], [0], [5])
    st = SearchState(inst, Params(step_limit=10))
    st.sol.assign([3])
    st.best, st.best_obj = [2], -2
    st.restore_step()
    assert st.sol.values == [2] and st.current_mode() is Mode.IMPROVE


def test_restore_uses_satisfied_rows_for_objective():
    # row0 violated by y only, x is free in a satisfied row; moving x down
    # leaves reduce 0 but beats the incumbent objective
    rows = [Constraint([(1, 1)], 0), Constraint([(0, 1)], 5)]
    inst = Instance(2, rows, [-1, 0], [0, 0], [5, 1])
    st = SearchState(inst, Params(step_limit=10, c_s=5, o_s=5))
    st.sol.assign([2, 1])
    st.best, st.best_obj = [3, 0], -3
    st.tabu_dec[1] = 100   # forbid repairing row 0 directly
    st.restore_step()
    assert st.sol.values == [5, 1]


def test_restart_crossover_and_weight_reset():
    inst = Instance(3, [Constraint([(0, 1)], 1)], [1, 1, 1], [0, 0, 0], [9, 9, 9])
    st = SearchState(inst, Params(step_limit=10))
    st.best = [1, 2, 3]
    st.weights.con_weights = [7]
    st.weights.obj_weight = 3

    class Heads(random.Random):
        def random(self):
            return 0.0

    st.rng = Heads(0)
    st.restart()
    assert st.sol.values == [1, 2, 3]
    assert st.weights.con_weights == [1] and st.weights.obj_weight == 1
    assert st.counters["restarts"] == 1


def test_restart_without_incumbent_stays_in_bounds():
    inst = Instance(2, [], [1, 1], [-INF, 2], [3, 4])
    st = SearchState(inst, Params(step_limit=10))
    for _ in range(50):
        st.restart()
        x = st.sol.values
        assert x[0] <= 3 and 2 <= x[1] <= 4


def test_knapsack_optimum():
    res = run(knapsack(), Params(step_limit=10_000, seed=1))
    assert res.feasible and res.best_obj == -7 and res.best == [1, 1]
    assert knapsack().reported_objective(res.best_obj) == 7


def test_infeasible_toy():
    inst = Instance(1, [Constraint([(0, 1)], 0), Constraint([(0, -1)], -1)], [1], [0], [5])
    res = run(inst, Params(step_limit=2000))
    assert res.best is None and res.trace.events == []


def test_same_seed_same_trace():
    rng = random.Random(1)
    from ilpls.boundary_oracle import random_instance
    inst = random_instance(rng, n_max=6)
    a = run(inst, Params(step_limit=5000, seed=9))
    b = run(inst, Params(step_limit=5000, seed=9))
    assert json.dumps(a.trace.to_dict()) == json.dumps(b.trace.to_dict())
    assert a.best == b.best


def test_trace_is_strictly_improving_and_feasible():
    from ilpls.boundary_oracle import random_instance
    rng = random.Random(12)
    for k in range(15):
        inst = random_instance(rng, n_max=5)
        res = run(inst, Params(step_limit=3000, seed=k, restart_steps=500))
        assert res.feasible
        assert oracles.feasible(inst, res.best)
        assert res.best_obj == pytest.approx(oracles.objective(inst, res.best))
        objs = [o for _, o in res.trace.events]
        assert objs == sorted(objs, reverse=True) and len(set(objs)) == len(objs)


def test_time_limit_clock():
    res = run(knapsack(), Params(time_limit=0.2))
    assert res.clock == "seconds" and res.trace.t_max == 0.2
    assert all(0 <= t <= 0.2 for t, _ in res.trace.events)


def test_fixed_increment_uses_fixed_moves():
    from ilpls.boundary_oracle import random_instance
    inst = random_instance(random.Random(3), n_max=5)
    kinds = set()
    SearchState(inst, Params(step_limit=500, fixed_increment=1),
                observer=lambda st, mv: kinds.add(mv.kind)).run()
    assert OpKind.TIGHT not in kinds and OpKind.FIXED in kinds


def test_brute_force_agreement_small():
    from ilpls.boundary_oracle import random_instance
    rng = random.Random(99)
    hits = 0
    for k in range(30):
        inst = random_instance(rng, n_max=4)
        opt, _ = oracles.brute_force(inst)
        res = run(inst, Params(step_limit=20_000, seed=k), objective_stop=opt)
        assert res.feasible and is_feasible(inst, res.best)
        assert res.best_obj >= opt - 1e-9
        hits += abs(res.best_obj - opt) < 1e-9
    assert hits >= 27
