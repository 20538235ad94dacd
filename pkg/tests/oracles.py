"""Reference implementations used only by the tests.

These deliberately avoid the package's own evaluation code: plain loops over
dense data, so a bug in the solver's sparse bookkeeping cannot hide itself.
"""

from __future__ import annotations

import itertools
import math


def dense_rows(inst):
    rows = []
    for row in inst.rows:
        coefs = [0.0] * inst.num_vars
        for j, a in row.terms:
            coefs[j] = a
        rows.append((coefs, row.rhs))
    return rows


def feasible(inst, x, tol=1e-6) -> bool:
    for j, v in enumerate(x):
        if v < inst.lower[j] or v > inst.upper[j]:
            return False
    for coefs, rhs in dense_rows(inst):
        if sum(a * v for a, v in zip(coefs, x)) > rhs + tol:
            return False
    return True


def objective(inst, x) -> float:
    return sum(c * v for c, v in zip(inst.cost, x)) + inst.obj_constant


def brute_force(inst):
    """(optimal internal objective, one optimal point) or (None, None); needs finite bounds."""
    ranges = [range(int(lo), int(hi) + 1) for lo, hi in zip(inst.lower, inst.upper)]
    best, arg = None, None
    for x in itertools.product(*ranges):
        if feasible(inst, x):
            o = objective(inst, x)
            if best is None or o < best - 1e-12:
                best, arg = o, list(x)
    return best, arg


def mps_document_value(doc, values: dict) -> tuple[bool, float]:
    """Feasibility and objective of a named assignment, straight from raw MPS data."""
    obj = -doc.rhs.get(doc.objective_row, 0.0)
    act = {r: 0.0 for r in doc.row_senses}
    for col, entries in doc.columns.items():
        v = values[col]
        lo, hi = doc.lower.get(col, 0.0), doc.upper.get(col, math.inf)
        if v < lo - 1e-9 or v > hi + 1e-9:
            return False, math.nan
        for row, a in entries.items():
            if row == doc.objective_row:
                obj += a * v
            else:
                act[row] += a * v
    ok = True
    for row, sense in doc.row_senses.items():
        b = doc.rhs.get(row, 0.0)
        r = doc.ranges.get(row)
        if sense == "L":
            ok &= act[row] <= b + 1e-9 and (r is None or act[row] >= b - abs(r) - 1e-9)
        elif sense == "G":
            ok &= act[row] >= b - 1e-9 and (r is None or act[row] <= b + abs(r) + 1e-9)
        else:
            lo, hi = (b, b) if not r else ((b, b + r) if r > 0 else (b + r, b))
            ok &= lo - 1e-9 <= act[row] <= hi + 1e-9
    return ok, obj
