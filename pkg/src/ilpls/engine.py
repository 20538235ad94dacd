"""Three-mode local search: Search, Improve and Restore.

A run alternates between the modes depending on whether an incumbent exists
and whether the current assignment is feasible. Search and Restore apply
tight moves chosen by BMS sampling with tabu; Improve applies lift moves and,
when stuck, a unit incremental move that deliberately leaves the feasible
region.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Callable, Sequence

from .lift_move import lfd_from_activity
from .metrics import PrimalTrace
from .model import INF, Instance, LiveSolution, evaluate_objective
from .tight_move import WeightState, fixed_step, paws_update, reduce_score, tm_step

RANDOM_FALLBACK_RETRIES = 10
UNBOUNDED_SPAN = 10**6
TIME_CHECK_MASK = 255


class Mode(str, Enum):
    SEARCH = "search"
    IMPROVE = "improve"
    RESTORE = "restore"


class OpKind(str, Enum):
    TIGHT = "tight"     # tight move (Search / Restore)
    LIFT = "lift"       # lift move (Improve)
    UNIT = "unit"       # unit incremental perturbation (Improve)
    BOUND = "bound"     # perturbation to a global bound (Improve, bound variant)
    FIXED = "fixed"     # fixed-increment replacement of the tight move (ablation)


UNIT_MOVE_VARIANTS = ("unit", "bound", "random")


@dataclass
class Params:
    beta: float = 0.5
    sp: float = 0.0003
    c_v: int = 3
    o_v: int = 2000
    c_s: int = 30
    o_s: int = 350
    o_r: int = 150
    tabu_base: int = 3
    tabu_rand: int = 10
    restart_steps: int = 1_500_000
    time_limit: float | None = None
    step_limit: int | None = None
    seed: int = 1
    unit_move: str = "unit"
    fixed_increment: int | None = None

    def __post_init__(self):
        for name in ("c_v", "o_v", "c_s", "o_s", "o_r", "restart_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if not 0.0 <= self.sp <= 1.0:
            raise ValueError("sp must lie in [0, 1]")
        if self.tabu_rand < 1 or self.tabu_base < 0:
            raise ValueError("tabu_base must be >= 0 and tabu_rand >= 1")
        if self.unit_move not in UNIT_MOVE_VARIANTS:
            raise ValueError(f"unit_move must be one of {UNIT_MOVE_VARIANTS}")
        if self.fixed_increment is not None and self.fixed_increment < 1:
            raise ValueError("fixed_increment must be >= 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.step_limit is not None and self.step_limit < 0:
            raise ValueError("step_limit must be >= 0")


@dataclass
class AppliedMove:
    step: int
    kind: OpKind
    var: int
    old: int
    new: int
    mode: Mode
    tabu_until: int | None = None


@dataclass
class RunResult:
    best: list[int] | None
    best_obj: float
    trace: PrimalTrace
    stats: dict = field(default_factory=dict)
    clock: str = "steps"

    @property
    def feasible(self) -> bool:
        return self.best is not None


def initialize(inst: Instance, rng=None) -> list[int]:
    values = []
    for lo, hi in zip(inst.lower, inst.upper):
        if lo > 0:
            values.append(int(lo))
        elif hi < 0:
            values.append(int(hi))
        else:
            values.append(0)
    return values


class SearchState:
    """Mutable state of one solver run. Not shareable across threads."""

    def __init__(self, inst: Instance, params: Params, observer: Callable | None = None):
        self.inst = inst
        self.params = params
        self.rng = random.Random(params.seed)
        self.sol = LiveSolution(inst, initialize(inst, self.rng))
        self.weights = WeightState.for_instance(inst.num_cons, params.sp)
        self.best: list[int] | None = None
        self.best_obj = INF
        n = inst.num_vars
        # step numbers up to which an increase / decrease of x_j by tm is forbidden
        self.tabu_inc = [-1] * n
        self.tabu_dec = [-1] * n
        self.last_modified = [-1] * n
        self.obj_vars = [j for j in range(n) if inst.cost[j] != 0.0]
        self.step = 0
        self.steps_since_improve = 0
        self.mode: Mode | None = None
        self.finished = False
        self.observer = observer
        self.counters = {"restarts": 0, "mode_transitions": 0, "weight_updates": 0,
                         "skipped_steps": 0, "search": 0, "improve": 0, "restore": 0,
                         "lift": 0, "tight": 0, "unit": 0, "bound": 0, "fixed": 0}
        if params.fixed_increment is None:
            self._step_fn = tm_step
        else:
            inc = params.fixed_increment
            self._step_fn = lambda c, d, v, lo, hi: fixed_step(c, d, v, lo, hi, inc)

    # -- bookkeeping ------------------------------------------------------

    def current_mode(self) -> Mode:
        if self.best is None:
            return Mode.SEARCH
        return Mode.IMPROVE if self.sol.feasible else Mode.RESTORE

    def _apply(self, kind: OpKind, j: int, new: int, tabu_until: int | None = None):
        old = self.sol.values[j]
        self.sol.move(j, new)
        self.last_modified[j] = self.step
        self.counters[kind.value] += 1
        if self.observer is not None:
            self.observer(self, AppliedMove(self.step, kind, j, old, new, self.mode, tabu_until))

    def _apply_tm(self, j: int, d: int):
        tt = self.params.tabu_base + self.rng.randrange(self.params.tabu_rand)
        until = self.step + tt
        if d > 0:
            self.tabu_dec[j] = until
        else:
            self.tabu_inc[j] = until
        kind = OpKind.TIGHT if self.params.fixed_increment is None else OpKind.FIXED
        self._apply(kind, j, self.sol.values[j] + d, until)

    def _update_weights(self):
        self.counters["weight_updates"] += 1
        paws_update(self.weights, self.sol.violated, self.sol.objective, self.best_obj,
                    self.best is not None, self.rng)

    # -- tight move candidates -------------------------------------------

    def _row_candidates(self, i: int, out: list):
        inst, sol, step = self.inst, self.sol, self.step
        vals, lower, upper = sol.values, inst.lower, inst.upper
        tabu_inc, tabu_dec = self.tabu_inc, self.tabu_dec
        delta = inst.rhs[i] - sol.activity[i]
        fn = self._step_fn
        for j, coef in inst.rows[i].terms:
            d = fn(coef, delta, vals[j], lower[j], upper[j])
            if d > 0:
                if step <= tabu_inc[j]:
                    continue
            elif d < 0:
                if step <= tabu_dec[j]:
                    continue
            else:
                continue
            out.append((j, d))

    def _select(self, cands: Sequence[tuple[int, int]], live_obj: bool, positive_only: bool):
        """Highest score_tm candidate; ties go to the least recently modified variable."""
        inst, sol = self.inst, self.sol
        act, w, beta = sol.activity, self.weights.con_weights, self.params.beta
        cost, cur_obj, best_obj = inst.cost, sol.objective, self.best_obj
        w_obj = float(self.weights.obj_weight)
        best_s = -INF
        best: list[tuple[int, int]] = []
        for j, d in cands:
            s = reduce_score(inst, act, j, d, w, beta)
            if live_obj:
                s += w_obj if cur_obj + cost[j] * d < best_obj else -w_obj
            if positive_only and s <= 0.0:
                continue
            if s > best_s:
                best_s = s
                best = [(j, d)]
            elif s == best_s:
                best.append((j, d))
        if not best:
            return None
        if len(best) > 1:
            lm = self.last_modified
            oldest = min(lm[j] for j, _ in best)
            best = [c for c in best if lm[c[0]] == oldest]
            if len(best) > 1:
                return best[self.rng.randrange(len(best))]
        return best[0]

    def _bms(self, rows: Sequence[int], ops: int, live_obj: bool):
        cands: list[tuple[int, int]] = []
        for i in rows:
            self._row_candidates(i, cands)
        if len(cands) > ops:
            cands = self.rng.sample(cands, ops)
        return self._select(cands, live_obj, positive_only=True)

    def _sample_violated(self) -> list[int]:
        viol = self.sol.violated.items
        c_v = self.params.c_v
        return list(viol) if len(viol) <= c_v else self.rng.sample(viol, c_v)

    def _sample_satisfied(self) -> list[int]:
        m = self.inst.num_cons
        viol = self.sol.violated
        k = min(m, self.params.c_s + len(viol))
        rows = self.rng.sample(range(m), k)
        return [i for i in rows if i not in viol][: self.params.c_s]

    def _random_fallback(self, live_obj: bool):
        viol = self.sol.violated.items
        for _ in range(RANDOM_FALLBACK_RETRIES):
            i = viol[self.rng.randrange(len(viol))]
            cands: list[tuple[int, int]] = []
            self._row_candidates(i, cands)
            if not cands:
                continue
            if len(cands) > self.params.o_r:
                cands = self.rng.sample(cands, self.params.o_r)
            return self._select(cands, live_obj, positive_only=False)
        return None

    def _stuck(self, live_obj: bool):
        self._update_weights()
        op = self._random_fallback(live_obj)
        if op is None:
            self._update_weights()
            self.counters["skipped_steps"] += 1
            return
        self._apply_tm(*op)

    # -- modes ------------------------------------------------------------

    def search_step(self):
        op = self._bms(self._sample_violated(), self.params.o_v, live_obj=False)
        if op is None:
            self._stuck(live_obj=False)
        else:
            self._apply_tm(*op)

    def restore_step(self):
        op = self._bms(self._sample_violated(), self.params.o_v, live_obj=True)
        if op is None:
            op = self._bms(self._sample_satisfied(), self.params.o_s, live_obj=True)
        if op is None:
            self._stuck(live_obj=True)
        else:
            self._apply_tm(*op)

    def improve_step(self):
        inst, sol = self.inst, self.sol
        vals, act, cost = sol.values, sol.activity, inst.cost
        best_s = 0.0
        best: list[tuple[int, int]] = []
        for j in self.obj_vars:
            dom = lfd_from_activity(inst, act, j, vals[j])
            target = dom.hi if cost[j] < 0 else dom.lo
            if target == vals[j] or math.isinf(target):
                continue
            s = cost[j] * (vals[j] - target)
            if s > best_s:
                best_s = s
                best = [(j, int(target))]
            elif s == best_s and s > 0.0:
                best.append((j, int(target)))
        if best:
            if len(best) > 1:
                lm = self.last_modified
                oldest = min(lm[j] for j, _ in best)
                best = [c for c in best if lm[c[0]] == oldest]
            j, target = best[self.rng.randrange(len(best))] if len(best) > 1 else best[0]
            self._apply(OpKind.LIFT, j, target)
            return
        self._unit_move()

    def _unit_move(self):
        inst, vals = self.inst, self.sol.values
        movable = [j for j in self.obj_vars
                   if (inst.cost[j] < 0 and vals[j] < inst.upper[j])
                   or (inst.cost[j] > 0 and vals[j] > inst.lower[j])]
        if not movable:
            # every objective variable sits at its improving bound
            self.finished = True
            return
        j = movable[self.rng.randrange(len(movable))]
        up = inst.cost[j] < 0
        room = (inst.upper[j] - vals[j]) if up else (vals[j] - inst.lower[j])
        variant = self.params.unit_move
        kind = OpKind.UNIT
        size = 1
        if variant == "bound" and not math.isinf(room):
            size, kind = int(room), OpKind.BOUND
        elif variant == "random":
            size = self.rng.randint(1, int(min(room, UNBOUNDED_SPAN)))
        self._apply(kind, j, vals[j] + size if up else vals[j] - size)

    # -- restart ----------------------------------------------------------

    def _random_value(self, j: int, ref: int) -> int:
        lo, hi = self.inst.lower[j], self.inst.upper[j]
        lo = ref - UNBOUNDED_SPAN if math.isinf(lo) else lo
        hi = ref + UNBOUNDED_SPAN if math.isinf(hi) else hi
        return self.rng.randint(int(lo), int(hi))

    def restart(self):
        rng = self.rng
        if self.best is not None:
            new = [b if rng.random() < 0.5 else self._random_value(j, b)
                   for j, b in enumerate(self.best)]
        else:
            new = [self._random_value(j, v) for j, v in enumerate(self.sol.values)]
        self.sol.assign(new)
        self.weights.reset()
        n = self.inst.num_vars
        self.tabu_inc = [-1] * n
        self.tabu_dec = [-1] * n
        self.steps_since_improve = 0
        self.counters["restarts"] += 1

    # -- main loop --------------------------------------------------------

    def _check_incumbent(self, trace: PrimalTrace, now: float) -> bool:
        sol = self.sol
        if sol.violated or not sol.objective < self.best_obj:
            return False
        exact = evaluate_objective(self.inst, sol.values)
        if not exact < self.best_obj:
            return False
        self.best = list(sol.values)
        self.best_obj = exact
        if trace.events and now <= trace.events[-1][0]:
            now = math.nextafter(trace.events[-1][0], INF)
        trace.record(now, exact)
        self.steps_since_improve = 0
        return True

    def run(self, objective_stop: float | None = None) -> RunResult:
        """Run until the step or time budget is spent.

        ``objective_stop`` ends the run as soon as the incumbent reaches that
        value (like a best-objective stop in MIP solvers).
        """
        p = self.params
        if p.time_limit is None and p.step_limit is None:
            raise ValueError("a time_limit or step_limit is required")
        clock = "steps" if p.time_limit is None else "seconds"
        t_max = float(p.step_limit if clock == "steps" else p.time_limit)
        trace = PrimalTrace(t_max=t_max)
        start = time.perf_counter()

        def now() -> float:
            if clock == "steps":
                return float(self.step)
            return min(time.perf_counter() - start, t_max)

        step_limit = p.step_limit
        time_limit = p.time_limit
        while True:
            if step_limit is not None and self.step >= step_limit:
                break
            if time_limit is not None and not (self.step & TIME_CHECK_MASK):
                if time.perf_counter() - start >= time_limit:
                    break
            self._check_incumbent(trace, now())
            if objective_stop is not None and self.best_obj <= objective_stop + 1e-9:
                break
            mode = self.current_mode()
            if mode is not self.mode:
                if self.mode is not None:
                    self.counters["mode_transitions"] += 1
                self.mode = mode
            self.counters[mode.value] += 1
            if mode is Mode.SEARCH:
                self.search_step()
            elif mode is Mode.IMPROVE:
                self.improve_step()
            else:
                self.restore_step()
            if self.finished:
                break
            self.step += 1
            self.steps_since_improve += 1
            if self.steps_since_improve >= p.restart_steps:
                self.restart()
        self._check_incumbent(trace, now())

        stats = {"steps": self.step, "optimal_proved": self.finished,
                 "wall_time": time.perf_counter() - start}
        stats.update(self.counters)
        return RunResult(self.best, self.best_obj, trace, stats, clock)


def run(inst: Instance, params: Params, observer: Callable | None = None,
        objective_stop: float | None = None) -> RunResult:
    return SearchState(inst, params, observer).run(objective_stop=objective_stop)


def params_dict(params: Params) -> dict:
    return asdict(params)
