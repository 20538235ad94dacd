"""Primal gap, primal integral and per-configuration benchmark aggregation.

All objective values handled here are in the minimization sense.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping

WIN_TOL = 1e-6


class MissingRunError(ValueError):
    pass


@dataclass
class PrimalTrace:
    """Improving incumbents ``(t, objective)`` over ``[0, t_max]``."""

    events: list[tuple[float, float]] = field(default_factory=list)
    t_max: float = 0.0
    reference_obj: float | None = None

    def __post_init__(self):
        self.events = [(float(t), float(o)) for t, o in self.events]
        for (t0, o0), (t1, o1) in zip(self.events, self.events[1:]):
            if not t1 > t0:
                raise ValueError("event times must be strictly increasing")
            if not o1 < o0:
                raise ValueError("event objectives must strictly improve")
        if self.events and not (0.0 <= self.events[0][0] and self.events[-1][0] <= self.t_max):
            raise ValueError("event times must lie in [0, t_max]")

    def record(self, t: float, obj: float):
        if self.events:
            t0, o0 = self.events[-1]
            if not t > t0 or not obj < o0:
                raise ValueError("event must be later and strictly better than the last one")
        self.events.append((float(t), float(obj)))

    @property
    def best(self) -> float | None:
        return self.events[-1][1] if self.events else None

    def to_dict(self) -> dict:
        return {"t_max": self.t_max, "reference": self.reference_obj,
                "events": [{"t": t, "objective": o} for t, o in self.events]}


def primal_gap(found: float, reference: float) -> float:
    if reference == 0.0 and found == 0.0:
        return 0.0
    if reference * found < 0.0:
        return 1.0
    return abs(reference - found) / max(abs(reference), abs(found))


def primal_gap_function(trace: PrimalTrace, t: float, reference: float | None = None) -> float:
    ref = trace.reference_obj if reference is None else reference
    best = None
    for ti, obj in trace.events:
        if ti > t:
            break
        best = obj
    if best is None or ref is None:
        return 1.0
    return primal_gap(best, ref)


def primal_integral(trace: PrimalTrace, reference: float | None = None, T: float | None = None) -> float:
    """Step-function integral of the primal gap over ``[0, T]`` (default ``t_max``)."""
    ref = trace.reference_obj if reference is None else reference
    T = trace.t_max if T is None else T
    total = 0.0
    prev_t, p = 0.0, 1.0
    for t, obj in trace.events:
        if t > T:
            break
        total += p * (t - prev_t)
        prev_t = t
        p = 1.0 if ref is None else primal_gap(obj, ref)
    total += p * (T - prev_t)
    return total


@dataclass
class RunRecord:
    instance: str
    config: str
    trace: PrimalTrace | None = None
    error: str | None = None
    stats: dict = field(default_factory=dict)


@dataclass
class ConfigSummary:
    config: str
    feas: int = 0
    win: int = 0
    primal_integral: float = 0.0
    errors: int = 0


@dataclass
class Report:
    summaries: dict[str, ConfigSummary]
    rows: list[dict]
    reference_from_matrix: list[str]

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1,
            "summary": [vars(s) for s in self.summaries.values()],
            "reference_from_matrix": self.reference_from_matrix,
            "rows": self.rows,
        }, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["config", "feas", "win", "primal_integral", "errors"])
        for s in self.summaries.values():
            w.writerow([s.config, s.feas, s.win, f"{s.primal_integral:.6f}", s.errors])
        return buf.getvalue()


def aggregate(records: list[RunRecord], references: Mapping[str, float] | None = None) -> Report:
    """Compute #feas, #win and mean P(T) per config over an instance x config matrix.

    Instances without a supplied reference are measured against the best
    objective found anywhere in the matrix; their names are listed in
    ``reference_from_matrix``.
    """
    references = dict(references or {})
    instances = sorted({r.instance for r in records})
    configs = sorted({r.config for r in records})
    table = {(r.instance, r.config): r for r in records}
    missing = [(i, c) for i in instances for c in configs if (i, c) not in table]
    if missing:
        raise MissingRunError(f"missing runs: {missing[:5]}")

    summaries = {c: ConfigSummary(c) for c in configs}
    rows = []
    from_matrix = []
    for inst in instances:
        bests = {}
        for c in configs:
            rec = table[(inst, c)]
            if rec.error is None and rec.trace is not None and rec.trace.best is not None:
                bests[c] = rec.trace.best
        overall = min(bests.values()) if bests else None
        ref = references.get(inst)
        if ref is None:
            ref = overall
            from_matrix.append(inst)
        for c in configs:
            rec = table[(inst, c)]
            s = summaries[c]
            row = {"instance": inst, "config": c, "error": rec.error,
                   "best": bests.get(c), "reference": ref}
            if rec.error is not None or rec.trace is None:
                s.errors += 1
                row["primal_integral"] = None
                row["win"] = False
            else:
                if c in bests:
                    s.feas += 1
                won = c in bests and overall is not None and bests[c] <= overall + WIN_TOL
                s.win += won
                pi = primal_integral(rec.trace, reference=ref)
                row["primal_integral"] = pi
                row["win"] = won
                row["t_max"] = rec.trace.t_max
            row.update({k: v for k, v in rec.stats.items() if k not in row})
            rows.append(row)
    for c in configs:
        vals = [r["primal_integral"] for r in rows if r["config"] == c and r["primal_integral"] is not None]
        summaries[c].primal_integral = sum(vals) / len(vals) if vals else math.nan
    return Report(summaries, rows, from_matrix)
