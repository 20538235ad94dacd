"""Randomized suites over the boundary oracle, shared by the CLI and the tests."""

from __future__ import annotations

import random
from typing import Callable

from .boundary_oracle import (
    Box,
    EmptyFeasible,
    Verdict,
    check_fact1_fact2,
    check_fact3,
    check_fact4,
    check_prop1,
    check_prop2,
    check_prop3,
    check_prop4,
    enumerate_feasible,
    random_instance,
    random_point,
)
from .engine import Params
from .tight_move import tm_step


def off_by_one_tm(coef, delta, value, lo, hi) -> int:
    """Deliberately broken tight move that stops one unit short (mutation testing)."""
    d = tm_step(coef, delta, value, lo, hi)
    if d > 0:
        return d - 1
    if d < 0:
        return d + 1
    return d


MUTANTS: dict[str, Callable] = {"tm-off-by-one": off_by_one_tm}


def prop1_suite(count: int = 200, seed: int = 1) -> Verdict:
    rng = random.Random(seed)
    v = Verdict("prop1")
    while v.checked + v.failed < count:
        inst = random_instance(rng, n_max=6, m_max=8, bound=5)
        try:
            v.merge(check_prop1(inst, Box.from_bounds(inst)))
        except EmptyFeasible:
            v.skipped += 1
    return v


def prop2_suite(count: int = 1000, seed: int = 2, step: Callable = tm_step) -> Verdict:
    rng = random.Random(seed)
    v = Verdict("prop2")
    for _ in range(count):
        inst = random_instance(rng, n_max=3, m_max=4, bound=5)
        x = random_point(rng, inst)
        i = rng.randrange(inst.num_cons)
        j = rng.choice([jj for jj, _ in inst.rows[i].terms])
        v.merge(check_prop2(inst, x, j, i, step))
    return v


def prop3_suite(count: int = 1000, seed: int = 3) -> Verdict:
    rng = random.Random(seed)
    v = Verdict("prop3")
    for _ in range(count):
        inst = random_instance(rng, n_max=3, m_max=4, bound=5)
        pts = enumerate_feasible(inst, Box.from_bounds(inst))
        x = [int(t) for t in pts[rng.randrange(len(pts))]]
        j = rng.choice([jj for jj, c in enumerate(inst.cost) if c])
        v.merge(check_prop3(inst, x, j))
    return v


def prop4_suite(runs: int = 50, steps: int = 10_000, seed: int = 4, **param_overrides) -> Verdict:
    rng = random.Random(seed)
    v = Verdict("prop4")
    for k in range(runs):
        inst = random_instance(rng, n_max=5, m_max=6, bound=5)
        params = Params(step_limit=steps, seed=seed * 1000 + k, **param_overrides)
        v.merge(check_prop4(inst, params))
    return v


def fact12_suite(draws: int = 500, seed: int = 5) -> tuple[Verdict, Verdict]:
    """Sample axis-aligned pairs of feasible points until ``draws`` pairs were checked."""
    rng = random.Random(seed)
    f1, f2 = Verdict("fact1"), Verdict("fact2")
    while f1.checked < draws:
        inst = random_instance(rng, n_max=4, m_max=6, bound=5)
        pts = [tuple(int(t) for t in p) for p in enumerate_feasible(inst, Box.from_bounds(inst))]
        x1 = pts[rng.randrange(len(pts))]
        j = rng.randrange(inst.num_vars)
        ups = [p for p in pts if p[j] > x1[j] and all(p[k] == x1[k] for k in range(len(p)) if k != j)]
        if not ups:
            continue
        a, b = check_fact1_fact2(inst, x1, ups[rng.randrange(len(ups))])
        f1.merge(a)
        f2.merge(b)
    return f1, f2


def fact3_suite(draws: int = 500, seed: int = 6) -> Verdict:
    rng = random.Random(seed)
    v = Verdict("fact3")
    for _ in range(draws):
        inst = random_instance(rng, n_max=4, m_max=6, bound=5)
        v.merge(check_fact3(inst, Box.from_bounds(inst)))
    return v


def fact4_suite(draws: int = 500, seed: int = 7) -> Verdict:
    rng = random.Random(seed)
    v = Verdict("fact4")
    for _ in range(draws):
        inst = random_instance(rng, n_max=8, m_max=6, binary=True, coef=3)
        v.merge(check_fact4(inst, Box.from_bounds(inst)))
    return v


def run_suites(props=(1, 2, 3, 4), facts=(1, 2, 3, 4), seed: int = 1, scale: float = 1.0,
               mutant: str | None = None, log: Callable[[str], None] | None = None) -> list[Verdict]:
    step = MUTANTS[mutant] if mutant else tm_step

    def n(k: int) -> int:
        return max(1, int(round(k * scale)))

    out: list[Verdict] = []

    def add(v: Verdict):
        out.append(v)
        if log:
            log(v.summary())

    if 1 in props:
        add(prop1_suite(n(200), seed))
    if 2 in props:
        add(prop2_suite(n(1000), seed + 1, step))
    if 3 in props:
        add(prop3_suite(n(1000), seed + 2))
    if 4 in props:
        add(prop4_suite(n(50), 10_000, seed + 3))
    if 1 in facts or 2 in facts:
        f1, f2 = fact12_suite(n(500), seed + 4)
        if 1 in facts:
            add(f1)
        if 2 in facts:
            add(f2)
    if 3 in facts:
        add(fact3_suite(n(500), seed + 5))
    if 4 in facts:
        add(fact4_suite(n(500), seed + 6))
    return out
