"""Brute-force checks of the boundary-solution properties on small instances.

A point is a boundary point when it is feasible and at least one of its 2n
unit neighbours is not. Variable bounds count as constraints here, so a
neighbour that leaves the bounds is infeasible.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .engine import OpKind, Params, SearchState
from .lift_move import lfd, lift_target
from .model import FEAS_TOL, Constraint, Instance, evaluate_objective, is_feasible
from .tight_move import tm_step

ENUM_BUDGET = 10**7
_CHUNK = 200_000
MAX_EXAMPLES = 20


class BudgetError(ValueError):
    pass


class EmptyFeasible(Exception):
    pass


@dataclass(frozen=True)
class Box:
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo/hi length mismatch")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError("empty box")

    @property
    def size(self) -> int:
        return math.prod(h - l + 1 for l, h in zip(self.lo, self.hi))

    @classmethod
    def from_bounds(cls, inst: Instance) -> "Box":
        if any(math.isinf(v) for v in inst.lower + inst.upper):
            raise ValueError("instance has infinite bounds; pass an explicit box")
        return cls(tuple(inst.lower), tuple(inst.upper))


def unit_directions(n: int) -> list[tuple[int, int]]:
    """The 2n neighbour directions as ``(variable, sign)`` pairs."""
    return [(j, s) for j in range(n) for s in (1, -1)]


@dataclass
class Verdict:
    """Outcome of one check; at most ``MAX_EXAMPLES`` counterexamples are kept."""

    name: str
    checked: int = 0
    skipped: int = 0
    failed: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def fail(self, example: dict):
        self.failed += 1
        if len(self.violations) < MAX_EXAMPLES:
            self.violations.append(example)

    def merge(self, other: "Verdict") -> "Verdict":
        self.checked += other.checked
        self.skipped += other.skipped
        self.failed += other.failed
        room = MAX_EXAMPLES - len(self.violations)
        self.violations.extend(other.violations[:max(room, 0)])
        return self

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: checked={self.checked} skipped={self.skipped} violations={self.failed}"


def instance_to_dict(inst: Instance) -> dict:
    return {"cost": inst.cost, "lower": inst.lower, "upper": inst.upper,
            "rows": [{"terms": row.terms, "rhs": row.rhs} for row in inst.rows]}


def dump_counterexamples(verdicts: Iterable[Verdict]) -> str:
    out = [{"check": v.name, **cx} for v in verdicts for cx in v.violations]
    return json.dumps(out, indent=2, default=str)


# -- enumeration ------------------------------------------------------------

def _dense(inst: Instance):
    A = np.zeros((inst.num_cons, inst.num_vars))
    for i, row in enumerate(inst.rows):
        for j, a in row.terms:
            A[i, j] = a
    return A, np.array(inst.rhs, dtype=float)


def feasibility_grid(inst: Instance, box: Box, pad: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Feasibility (rows and bounds) of every integer point of ``box`` grown by ``pad``.

    Returns ``(origin, grid)`` where ``grid[k]`` tells whether ``origin + k`` is feasible.
    """
    n = inst.num_vars
    if len(box.lo) != n:
        raise ValueError("box dimension does not match instance")
    if box.size > ENUM_BUDGET:
        raise BudgetError(f"box has {box.size} points, budget is {ENUM_BUDGET}")
    origin = np.array(box.lo, dtype=np.int64) - pad
    spans = np.array(box.hi, dtype=np.int64) - origin + 1 + pad
    A, b = _dense(inst)
    lower = np.array(inst.lower, dtype=float)
    upper = np.array(inst.upper, dtype=float)
    total = int(np.prod(spans))
    flat = np.empty(total, dtype=bool)
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        rem = np.arange(start, stop, dtype=np.int64)
        pts = np.empty((rem.size, n), dtype=np.int64)
        for j in range(n - 1, -1, -1):
            pts[:, j] = rem % spans[j] + origin[j]
            rem = rem // spans[j]
        ok = np.all((pts >= lower) & (pts <= upper), axis=1)
        if A.shape[0]:
            ok &= np.all(pts @ A.T <= b + FEAS_TOL, axis=1)
        flat[start:stop] = ok
    return origin, flat.reshape(tuple(spans))


def _inner(grid: np.ndarray, pad: int = 1) -> np.ndarray:
    return grid[tuple(slice(pad, s - pad) for s in grid.shape)]


def _shifted(grid: np.ndarray, j: int, s: int, pad: int = 1) -> np.ndarray:
    """Feasibility of the neighbour ``x + s*e_j`` for every inner point ``x``."""
    idx = [slice(pad, d - pad) for d in grid.shape]
    idx[j] = slice(pad + s, grid.shape[j] - pad + s)
    return grid[tuple(idx)]


def boundary_grid(inst: Instance, box: Box) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(origin, feasible, boundary)`` boolean arrays over ``box`` (no padding)."""
    origin, grid = feasibility_grid(inst, box)
    feas = _inner(grid)
    interior = feas.copy()
    for j, s in unit_directions(inst.num_vars):
        interior &= _shifted(grid, j, s)
    return origin + 1, feas, feas & ~interior


def enumerate_feasible(inst: Instance, box: Box) -> np.ndarray:
    """All feasible integer points in ``box`` as a ``(k, n)`` int array."""
    if inst.num_vars == 0:
        ok = all(r >= -FEAS_TOL for r in inst.rhs)
        return np.zeros((1 if ok else 0, 0), dtype=np.int64)
    origin, grid = feasibility_grid(inst, box, pad=0)
    return np.argwhere(grid) + origin


def is_boundary(inst: Instance, x: Sequence[int]) -> bool:
    x = [int(v) for v in x]
    if not is_feasible(inst, x):
        return False
    for j, s in unit_directions(inst.num_vars):
        y = list(x)
        y[j] += s
        if not is_feasible(inst, y):
            return True
    return False


# -- propositions -----------------------------------------------------------

def check_prop1(inst: Instance, box: Box) -> Verdict:
    """Every minimizer is a boundary point and the boundary attains the minimum."""
    v = Verdict("prop1")
    if not any(inst.cost):
        v.skipped += 1
        return v
    origin, feas, bnd = boundary_grid(inst, box)
    pts = np.argwhere(feas) + origin
    if len(pts) == 0:
        raise EmptyFeasible(inst.name)
    c = np.array(inst.cost)
    objs = pts @ c
    best = objs.min()
    v.checked += 1
    on_boundary = bnd[feas]
    for x in pts[np.isclose(objs, best, rtol=0.0, atol=1e-9)]:
        if not is_boundary(inst, x):
            v.fail({"instance": instance_to_dict(inst), "point": x.tolist(),
                    "reason": "minimizer is not a boundary point"})
            return v
    if not on_boundary.any() or not math.isclose(objs[on_boundary].min(), best, abs_tol=1e-9):
        v.fail({"instance": instance_to_dict(inst),
                "reason": "minimum over boundary differs from minimum over feasible set",
                "feasible_min": float(best),
                "boundary_min": float(objs[on_boundary].min()) if on_boundary.any() else None})
    return v


def apply_tm_raw(inst: Instance, x: Sequence[int], j: int, i: int,
                 step: Callable = tm_step) -> list[int]:
    """The point reached by the tight move on (x_j, row i), zero steps included."""
    row = inst.rows[i]
    coef = dict(row.terms)[j]
    delta = row.rhs - row.activity(x)
    y = list(x)
    y[j] += step(coef, delta, x[j], inst.lower[j], inst.upper[j])
    return y


def check_prop2(inst: Instance, x: Sequence[int], j: int, i: int,
                step: Callable = tm_step) -> Verdict:
    v = Verdict("prop2")
    y = apply_tm_raw(inst, x, j, i, step)
    if not is_feasible(inst, y):
        v.skipped += 1
        return v
    v.checked += 1
    if not is_boundary(inst, y):
        v.fail({"instance": instance_to_dict(inst), "start": list(x), "var": j,
                "row": i, "point": y, "reason": "feasible tight-move result is interior"})
    return v


def check_prop3(inst: Instance, x: Sequence[int], j: int) -> Verdict:
    v = Verdict("prop3")
    target = lift_target(inst, lfd(inst, j, x), j) if is_feasible(inst, x) else None
    if target is None or math.isinf(target):
        v.skipped += 1
        return v
    y = list(x)
    y[j] = int(target)
    v.checked += 1
    if not is_boundary(inst, y):
        v.fail({"instance": instance_to_dict(inst), "start": list(x), "var": j,
                "point": y, "reason": "lift-move result is not a boundary point"})
    return v


ALLOWED_KINDS = {OpKind.TIGHT, OpKind.LIFT, OpKind.UNIT, OpKind.BOUND}


def check_prop4(inst: Instance, params: Params) -> Verdict:
    """Run the engine and check every feasible assignment produced by a move."""
    v = Verdict("prop4")

    def observe(state: SearchState, move):
        if move.kind not in ALLOWED_KINDS:
            v.fail({"reason": f"unexpected move kind {move.kind}"})
            return
        if state.sol.feasible:
            v.checked += 1
            x = list(state.sol.values)
            if not is_boundary(inst, x):
                v.fail({"instance": instance_to_dict(inst), "point": x,
                        "move": move.kind.value, "step": move.step,
                        "reason": "engine produced an interior feasible point"})

    SearchState(inst, params, observer=observe).run()
    return v


# -- facts ------------------------------------------------------------------

def _feasible_set(inst: Instance, box: Box) -> set[tuple[int, ...]]:
    return {tuple(int(t) for t in p) for p in enumerate_feasible(inst, box)}


def check_fact1_fact2(inst: Instance, x1: Sequence[int], x2: Sequence[int]) -> tuple[Verdict, Verdict]:
    """Points between two feasible points on one axis are feasible with objective in between."""
    f1, f2 = Verdict("fact1"), Verdict("fact2")
    diff = [b - a for a, b in zip(x1, x2)]
    nz = [j for j, d in enumerate(diff) if d]
    if len(nz) != 1 or diff[nz[0]] <= 0 or not (is_feasible(inst, x1) and is_feasible(inst, x2)):
        f1.skipped += 1
        f2.skipped += 1
        return f1, f2
    j, k = nz[0], diff[nz[0]]
    o1, o2 = evaluate_objective(inst, x1), evaluate_objective(inst, x2)
    f1.checked += 1
    f2.checked += 1
    lo, hi = min(o1, o2), max(o1, o2)
    for t in range(k + 1):
        y = list(x1)
        y[j] += t
        if not is_feasible(inst, y):
            f1.fail({"instance": instance_to_dict(inst), "x1": list(x1), "x2": list(x2),
                     "point": y})
            break
    for t in range(k + 1):
        y = list(x1)
        y[j] += t
        o = evaluate_objective(inst, y)
        if not (lo - 1e-9 <= o <= hi + 1e-9):
            f2.fail({"instance": instance_to_dict(inst), "x1": list(x1), "x2": list(x2),
                     "point": y, "objective": o})
            break
    return f1, f2


def check_fact3(inst: Instance, box: Box) -> Verdict:
    """For each feasible x with an infeasible neighbour x + s*e_j, check that x
    minimizes -s*x_j over the feasible set, i.e. that the objective pointing at
    the infeasible neighbour makes x optimal."""
    v = Verdict("fact3")
    origin, grid = feasibility_grid(inst, box)
    feas = _inner(grid)
    if not feas.any():
        v.skipped += 1
        return v
    pts = np.argwhere(feas) + origin + 1
    for j, s in unit_directions(inst.num_vars):
        blocked = (feas & ~_shifted(grid, j, s))[feas]
        cand = pts[blocked]
        v.checked += len(cand)
        best = pts[:, j].max() if s > 0 else pts[:, j].min()
        for x in cand[cand[:, j] != best]:
            v.fail({"instance": instance_to_dict(inst), "point": x.tolist(),
                    "direction": [j, s], "optimum_along_axis": int(best),
                    "reason": "boundary point is not optimal for the neighbour objective"})
    return v


def check_fact4(inst: Instance, box: Box) -> Verdict:
    v = Verdict("fact4")
    if any(lo < 0 or hi > 1 for lo, hi in zip(inst.lower, inst.upper)):
        v.skipped += 1
        return v
    origin, feas, bnd = boundary_grid(inst, box)
    v.checked += int(feas.sum())
    for x in np.argwhere(feas & ~bnd) + origin:
        v.fail({"instance": instance_to_dict(inst), "point": x.tolist(),
                "reason": "binary feasible point is not a boundary point"})
    return v


def check_facts(inst: Instance, box: Box, rng: random.Random, pairs: int = 1) -> list[Verdict]:
    """fact1-fact3 checks on one instance; fact4 applies only to binary instances."""
    pts = [tuple(int(t) for t in p) for p in enumerate_feasible(inst, box)]
    f1, f2 = Verdict("fact1"), Verdict("fact2")
    for _ in range(pairs):
        if not pts:
            f1.skipped += 1
            f2.skipped += 1
            break
        x1 = pts[rng.randrange(len(pts))]
        j = rng.randrange(inst.num_vars)
        ups = [p for p in pts if p[j] > x1[j] and all(p[k] == x1[k] for k in range(len(p)) if k != j)]
        if not ups:
            f1.skipped += 1
            f2.skipped += 1
            continue
        a, b = check_fact1_fact2(inst, x1, ups[rng.randrange(len(ups))])
        f1.merge(a)
        f2.merge(b)
    return [f1, f2, check_fact3(inst, box), check_fact4(inst, box)]


# -- generators -------------------------------------------------------------

def random_instance(rng: random.Random, n_max: int = 6, m_max: int = 8, bound: int = 5,
                    coef: int = 5, binary: bool = False, n_min: int = 1) -> Instance:
    """Random bounded instance, feasible by construction (a hidden point satisfies every row)."""
    n = rng.randint(n_min, n_max)
    m = rng.randint(1, m_max)
    if binary:
        lower, upper = [0] * n, [1] * n
    else:
        lower, upper = [], []
        for _ in range(n):
            a, b = sorted((rng.randint(-bound, bound), rng.randint(-bound, bound)))
            lower.append(a)
            upper.append(b)
    hidden = [rng.randint(lo, hi) for lo, hi in zip(lower, upper)]
    rows = []
    for _ in range(m):
        k = rng.randint(1, n)
        vars_ = sorted(rng.sample(range(n), k))
        terms = [(j, rng.choice([c for c in range(-coef, coef + 1) if c])) for j in vars_]
        act = sum(a * hidden[j] for j, a in terms)
        rows.append(Constraint(terms, act + rng.randint(0, coef)))
    cost = [rng.randint(-coef, coef) for _ in range(n)]
    if not any(cost):
        cost[rng.randrange(n)] = rng.choice([-1, 1])
    return Instance(num_vars=n, rows=rows, cost=cost, lower=lower, upper=upper)


def random_point(rng: random.Random, inst: Instance) -> list[int]:
    return [rng.randint(lo, hi) for lo, hi in zip(inst.lower, inst.upper)]
