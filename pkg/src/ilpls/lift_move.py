"""Local domain reduction and the lift move."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .model import INF, Instance
from .tight_move import snap_ceil, snap_floor


@dataclass(frozen=True)
class Interval:
    """Integer interval; ``lo``/``hi`` may be -inf/+inf."""

    lo: float | int = -INF
    hi: float | int = INF

    def __and__(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    @property
    def empty(self) -> bool:
        return self.lo > self.hi


def _ldc(coef: float, delta: float, value: int) -> Interval:
    # feasible input: slack within tolerance of zero counts as zero
    if delta < 0.0:
        delta = 0.0
    if coef < 0:
        return Interval(value + snap_ceil(delta / coef), INF)
    return Interval(-INF, value + snap_floor(delta / coef))


def ldc(inst: Instance, j: int, i: int, a: Sequence[int]) -> Interval:
    row = inst.rows[i]
    coef = dict(row.terms).get(j)
    if coef is None:
        raise ValueError(f"variable {j} does not appear in row {i}")
    return _ldc(coef, row.rhs - row.activity(a), a[j])


def lfd_from_activity(inst: Instance, activity: Sequence[float], j: int, value: int) -> Interval:
    lo, hi = inst.lower[j], inst.upper[j]
    rhs = inst.rhs
    for i, coef in inst.cols[j]:
        delta = rhs[i] - activity[i]
        if delta < 0.0:
            delta = 0.0
        if coef < 0:
            cand = value + snap_ceil(delta / coef)
            if cand > lo:
                lo = cand
        else:
            cand = value + snap_floor(delta / coef)
            if cand < hi:
                hi = cand
    return Interval(lo, hi)


def lfd(inst: Instance, j: int, a: Sequence[int]) -> Interval:
    activity = [row.activity(a) for row in inst.rows]
    return lfd_from_activity(inst, activity, j, a[j])


@dataclass
class LmOperation:
    var: int
    new_value: int
    old_value: int


def lift_target(inst: Instance, domain: Interval, j: int):
    """End of ``domain`` that improves the objective, or None when ``c_j == 0``."""
    c = inst.cost[j]
    if c < 0:
        return domain.hi
    if c > 0:
        return domain.lo
    return None


def lm_candidate(inst: Instance, j: int, a: Sequence[int],
                 activity: Sequence[float] | None = None) -> LmOperation | None:
    if inst.cost[j] == 0.0:
        return None
    if activity is None:
        domain = lfd(inst, j, a)
    else:
        domain = lfd_from_activity(inst, activity, j, a[j])
    target = lift_target(inst, domain, j)
    if target is None or math.isinf(target) or target == a[j]:
        return None
    return LmOperation(var=j, new_value=int(target), old_value=a[j])


def score_lm(inst: Instance, a: Sequence[int], op: LmOperation) -> float:
    return inst.cost[op.var] * (op.old_value - op.new_value)
