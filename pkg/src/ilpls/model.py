"""Integer linear program instances, assignments and incremental row bookkeeping.

Every instance is held in the normalized form

    minimize    c.x + const
    subject to  A x <= b
                lower <= x <= upper,  x integer

Infinite bounds are ``math.inf`` / ``-math.inf``; finite bounds are ``int``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

FEAS_TOL = 1e-6
INF = math.inf

# values are plain lists of Python ints
Assignment = list


@dataclass
class Constraint:
    """One row ``sum(a * x[j] for j, a in terms) <= rhs``."""

    terms: list[tuple[int, float]]
    rhs: float

    def __post_init__(self):
        self.terms = [(int(j), float(a)) for j, a in self.terms]
        last = -1
        for j, a in self.terms:
            if j <= last:
                raise ValueError("constraint terms must have strictly increasing variable indices")
            if a == 0.0:
                raise ValueError(f"zero coefficient on variable {j}")
            last = j
        if not self.terms:
            raise ValueError("constraint has no terms")
        self.rhs = float(self.rhs)

    def activity(self, values: Sequence[int]) -> float:
        return sum(a * values[j] for j, a in self.terms)


def _check_bound(v, name: str):
    if isinstance(v, float) and math.isinf(v):
        return v
    if isinstance(v, float):
        if not v.is_integer():
            raise ValueError(f"{name} bound {v} is not integral")
        return int(v)
    return int(v)


@dataclass
class Instance:
    """A sparse ILP.

    ``cost`` is dense (length ``num_vars``); ``cols`` is built from ``rows`` and
    lists ``(row, coefficient)`` for each variable.
    """

    num_vars: int
    rows: list[Constraint]
    cost: list[float]
    lower: list
    upper: list
    var_names: list[str] = field(default_factory=list)
    con_names: list[str] = field(default_factory=list)
    obj_constant: float = 0.0
    maximize: bool = False
    name: str = ""
    cols: list[list[tuple[int, float]]] = field(init=False, repr=False)

    def __post_init__(self):
        n = self.num_vars
        if len(self.cost) != n or len(self.lower) != n or len(self.upper) != n:
            raise ValueError("cost/lower/upper must have num_vars entries")
        self.cost = [float(c) for c in self.cost]
        self.lower = [_check_bound(v, "lower") for v in self.lower]
        self.upper = [_check_bound(v, "upper") for v in self.upper]
        for j in range(n):
            if self.lower[j] == INF or self.upper[j] == -INF:
                raise ValueError(f"variable {j} has an empty domain")
            if self.lower[j] > self.upper[j]:
                raise ValueError(f"variable {j}: lower {self.lower[j]} > upper {self.upper[j]}")
        if not self.var_names:
            self.var_names = [f"x{j + 1}" for j in range(n)]
        if not self.con_names:
            self.con_names = [f"c{i + 1}" for i in range(len(self.rows))]
        cols: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for i, row in enumerate(self.rows):
            for j, a in row.terms:
                if j >= n:
                    raise ValueError(f"row {i} references variable {j} >= num_vars")
                cols[j].append((i, a))
        self.cols = cols
        self.rhs = [row.rhs for row in self.rows]

    @property
    def num_cons(self) -> int:
        return len(self.rows)

    @property
    def objective(self) -> dict[int, float]:
        return {j: c for j, c in enumerate(self.cost) if c != 0.0}

    @classmethod
    def from_dense(cls, A, b, c, lower, upper, **kw) -> "Instance":
        """Build from a dense matrix; zero entries are dropped and all-zero rows skipped."""
        rows = []
        for coeffs, rhs in zip(A, b):
            terms = [(j, a) for j, a in enumerate(coeffs) if a != 0]
            if terms:
                rows.append(Constraint(terms, rhs))
            elif rhs < -FEAS_TOL:
                raise ValueError("all-zero row with negative rhs is trivially infeasible")
        return cls(num_vars=len(c), rows=rows, cost=list(c), lower=list(lower), upper=list(upper), **kw)

    def reported_objective(self, internal: float) -> float:
        """Objective value in the instance's original sense."""
        return -internal if self.maximize else internal


def evaluate_objective(inst: Instance, a: Sequence[int]) -> float:
    total = inst.obj_constant
    for j, c in enumerate(inst.cost):
        if c:
            total += c * a[j]
    return total


def slack(inst: Instance, i: int, a: Sequence[int]) -> float:
    row = inst.rows[i]
    return row.rhs - row.activity(a)


def within_bounds(inst: Instance, a: Sequence[int]) -> bool:
    return all(lo <= v <= hi for v, lo, hi in zip(a, inst.lower, inst.upper))


def violated_rows(inst: Instance, a: Sequence[int]) -> list[int]:
    return [i for i in range(inst.num_cons) if slack(inst, i, a) < -FEAS_TOL]


def is_feasible(inst: Instance, a: Sequence[int]) -> bool:
    if len(a) != inst.num_vars or not within_bounds(inst, a):
        return False
    return all(slack(inst, i, a) >= -FEAS_TOL for i in range(inst.num_cons))


class IndexSet:
    """Subset of ``range(size)`` with O(1) add, discard and uniform sampling."""

    __slots__ = ("items", "_pos")

    def __init__(self, size: int, members: Iterable[int] = ()):
        self.items: list[int] = []
        self._pos = [-1] * size
        for i in members:
            self.add(i)

    def __len__(self):
        return len(self.items)

    def __contains__(self, i: int) -> bool:
        return self._pos[i] >= 0

    def __iter__(self):
        return iter(self.items)

    def add(self, i: int):
        if self._pos[i] < 0:
            self._pos[i] = len(self.items)
            self.items.append(i)

    def discard(self, i: int):
        p = self._pos[i]
        if p < 0:
            return
        last = self.items.pop()
        if last != i:
            self.items[p] = last
            self._pos[last] = p
        self._pos[i] = -1

    def clear(self):
        for i in self.items:
            self._pos[i] = -1
        self.items.clear()


class LiveSolution:
    """An assignment plus cached row activities, violated-row set and objective.

    ``move`` costs O(|col(j)|). Activities are recomputed from scratch every
    ``resync_every`` moves to bound floating-point drift.
    """

    def __init__(self, inst: Instance, values: Sequence[int], resync_every: int = 1_000_000):
        self.inst = inst
        self.values: list[int] = [int(v) for v in values]
        self.resync_every = resync_every
        self.violated = IndexSet(inst.num_cons)
        self.activity: list[float] = []
        self.objective = 0.0
        self._moves = 0
        self.resync()

    def resync(self):
        inst, vals = self.inst, self.values
        self.activity = [row.activity(vals) for row in inst.rows]
        self.violated.clear()
        for i, act in enumerate(self.activity):
            if act - inst.rhs[i] > FEAS_TOL:
                self.violated.add(i)
        self.objective = evaluate_objective(inst, vals)
        self._moves = 0

    def assign(self, values: Sequence[int]):
        self.values = [int(v) for v in values]
        self.resync()

    @property
    def feasible(self) -> bool:
        return not self.violated

    def move(self, j: int, new_value: int):
        old = self.values[j]
        d = new_value - old
        if d == 0:
            return
        self.values[j] = new_value
        act, rhs, viol = self.activity, self.inst.rhs, self.violated
        for i, a in self.inst.cols[j]:
            v = act[i] + a * d
            act[i] = v
            if v - rhs[i] > FEAS_TOL:
                viol.add(i)
            else:
                viol.discard(i)
        self.objective += self.inst.cost[j] * d
        self._moves += 1
        if self._moves >= self.resync_every:
            self.resync()
