"""Tight move operator, its weighted score, and the probabilistic PAWS weights."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .model import FEAS_TOL, Instance, evaluate_objective

SNAP = 1e-9
DEFAULT_SP = 0.0003


def snap_floor(x: float) -> int:
    r = round(x)
    if abs(x - r) <= SNAP:
        return int(r)
    return math.floor(x)


def snap_ceil(x: float) -> int:
    r = round(x)
    if abs(x - r) <= SNAP:
        return int(r)
    return math.ceil(x)


def tm_step(coef: float, delta: float, value: int, lo, hi) -> int:
    """Signed change that the tight move applies to one variable.

    ``delta`` is the row slack ``b_i - A_i.x``. A row counts as violated only
    when ``delta < -FEAS_TOL``; otherwise the slack is clamped at zero.
    """
    if delta < -FEAS_TOL:
        if coef < 0:
            return min(snap_ceil(delta / coef), hi - value)
        return -min(abs(snap_floor(delta / coef)), value - lo)
    if delta < 0.0:
        delta = 0.0
    if coef < 0:
        return -min(abs(snap_ceil(delta / coef)), value - lo)
    return min(snap_floor(delta / coef), hi - value)


def fixed_step(coef: float, delta: float, value: int, lo, hi, inc: int) -> int:
    """Fixed-increment replacement for :func:`tm_step` (ablation only).

    Moves in the same direction as the tight move would, by ``inc`` clamped to
    the variable bounds.
    """
    violated = delta < -FEAS_TOL
    increase = (coef < 0) if violated else (coef > 0)
    if increase:
        return min(inc, hi - value)
    return -min(inc, value - lo)


@dataclass
class TmOperation:
    var: int
    row: int
    new_value: int
    old_value: int

    @property
    def direction(self) -> str:
        return "increase" if self.new_value > self.old_value else "decrease"

    @property
    def change(self) -> int:
        return self.new_value - self.old_value


def tm_candidate(inst: Instance, j: int, i: int, a: Sequence[int]) -> TmOperation | None:
    coef = None
    for jj, c in inst.rows[i].terms:
        if jj == j:
            coef = c
            break
    if coef is None:
        raise ValueError(f"variable {j} does not appear in row {i}")
    delta = inst.rhs[i] - inst.rows[i].activity(a)
    d = tm_step(coef, delta, a[j], inst.lower[j], inst.upper[j])
    if d == 0:
        return None
    return TmOperation(var=j, row=i, new_value=a[j] + d, old_value=a[j])


@dataclass
class WeightState:
    con_weights: list[int]
    obj_weight: int = 1
    ul_con: int = 1000
    ul_obj: int = 100
    sp: float = DEFAULT_SP

    @classmethod
    def for_instance(cls, num_cons: int, sp: float = DEFAULT_SP) -> "WeightState":
        ul_con = max(1000, num_cons)
        return cls([1] * num_cons, 1, ul_con, ul_con // 10, sp)

    def reset(self):
        self.con_weights = [1] * len(self.con_weights)
        self.obj_weight = 1


def reduce_score(inst: Instance, activity: Sequence[float], j: int, d: int,
                 weights: Sequence[int], beta: float) -> float:
    """Violation-reduction score of changing ``x[j]`` by ``d``."""
    s = 0.0
    rhs = inst.rhs
    for i, a in inst.cols[j]:
        old = activity[i]
        new = old + a * d
        lim = rhs[i] + FEAS_TOL
        if old > lim:
            if new <= lim:
                s += weights[i]
            elif new < old:
                s += beta * weights[i]
            elif new > old:
                s -= beta * weights[i]
        elif new > lim:
            s -= weights[i]
    return s


def _activities(inst: Instance, a: Sequence[int]) -> list[float]:
    return [row.activity(a) for row in inst.rows]


def score_reduce(inst: Instance, a: Sequence[int], op: TmOperation, w: WeightState,
                 beta: float, activity: Sequence[float] | None = None) -> float:
    if activity is None:
        activity = _activities(inst, a)
    return reduce_score(inst, activity, op.var, op.change, w.con_weights, beta)


def score_improve(op: TmOperation, w: WeightState, best_obj: float, a: Sequence[int],
                  inst: Instance, mode: str = "search") -> float:
    # constant in search mode; chosen as 0
    if mode == "search":
        return 0.0
    after = evaluate_objective(inst, a) + inst.cost[op.var] * op.change
    return float(w.obj_weight) if after < best_obj else -float(w.obj_weight)


def score_tm(inst: Instance, a: Sequence[int], op: TmOperation, w: WeightState, beta: float,
             best_obj: float = math.inf, mode: str = "search") -> float:
    return score_reduce(inst, a, op, w, beta) + score_improve(op, w, best_obj, a, inst, mode)


def paws_update(w: WeightState, violated, objective: float, best_obj: float,
                feasible_ever: bool, rng) -> None:
    """One PAWS weight update, in place.

    ``violated`` is a container of violated row indices. A single draw picks
    the increase branch (probability ``1 - sp``) or the smoothing branch for
    both the row weights and the objective weight.
    """
    cw = w.con_weights
    if rng.random() >= w.sp:
        ul = w.ul_con
        for i in violated:
            if cw[i] < ul:
                cw[i] += 1
        if feasible_ever and objective >= best_obj and w.obj_weight < w.ul_obj:
            w.obj_weight += 1
    else:
        for i in range(len(cw)):
            if cw[i] > 1 and i not in violated:
                cw[i] -= 1
        if feasible_ever and objective < best_obj and w.obj_weight > 1:
            w.obj_weight -= 1


def update_weights(inst: Instance, a: Sequence[int], w: WeightState, best_obj: float,
                   feasible_ever: bool, rng) -> WeightState:
    violated = {i for i, row in enumerate(inst.rows) if row.rhs - row.activity(a) < -FEAS_TOL}
    paws_update(w, violated, evaluate_objective(inst, a), best_obj, feasible_ever, rng)
    return w
