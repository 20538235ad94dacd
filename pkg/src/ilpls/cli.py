"""``ilpls`` command line: solve, bench and verify."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .boundary_oracle import dump_counterexamples
from .engine import UNIT_MOVE_VARIANTS, Params, params_dict, run
from .metrics import PrimalTrace, RunRecord, aggregate
from .mps import ParseError, UnsupportedError, read_mps, write_solution
from .verify import MUTANTS, run_suites

log = logging.getLogger("ilpls")

SCHEMA = 1
DEFAULT_TIME_LIMIT = 10.0

# bench presets; each is a set of Params overrides
PRESETS: dict[str, dict] = {
    "default": {},
    "unit-bound": {"unit_move": "bound"},
    "unit-random": {"unit_move": "random"},
    "fix1": {"fixed_increment": 1},
    "fix5": {"fixed_increment": 5},
}

EXIT_FEASIBLE, EXIT_NONE, EXIT_INPUT = 0, 1, 2


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _add_params(p: argparse.ArgumentParser):
    g = p.add_argument_group("search parameters")
    g.add_argument("--time-limit", type=_positive_float, help="wall-clock budget in seconds (default 10)")
    g.add_argument("--step-limit", type=_nonneg_int,
                   help="deterministic step budget; without --time-limit the clock counts steps")
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--beta", type=float)
    g.add_argument("--sp", type=float, help="smoothing probability")
    g.add_argument("--cv", dest="c_v", type=int, help="violated-row samples")
    g.add_argument("--ov", dest="o_v", type=int, help="operations sampled in search mode")
    g.add_argument("--cs", dest="c_s", type=int, help="satisfied-row samples")
    g.add_argument("--os", dest="o_s", type=int, help="operations sampled from satisfied rows")
    g.add_argument("--or", dest="o_r", type=int, help="operations sampled in restore mode")
    g.add_argument("--restart-steps", type=int)
    g.add_argument("--unit-move", choices=UNIT_MOVE_VARIANTS)
    g.add_argument("--fixed-increment", type=int, help=argparse.SUPPRESS)


def params_from_args(args, **extra) -> Params:
    fields = ("beta", "sp", "c_v", "o_v", "c_s", "o_s", "o_r", "restart_steps", "unit_move",
              "fixed_increment")
    kw = {f: getattr(args, f) for f in fields if getattr(args, f, None) is not None}
    time_limit = args.time_limit
    if time_limit is None and args.step_limit is None:
        time_limit = DEFAULT_TIME_LIMIT
    kw.update(extra)
    return Params(time_limit=time_limit, step_limit=args.step_limit, seed=args.seed, **kw)


def _trace_json(inst, result, params: Params, deterministic: bool) -> str:
    stats = dict(result.stats)
    if deterministic:
        stats.pop("wall_time", None)
    report = inst.reported_objective
    doc = {
        "schema": SCHEMA,
        "instance": inst.name,
        "params": params_dict(params),
        "clock": result.clock,
        "feasible": result.feasible,
        "best_objective": report(result.best_obj) if result.feasible else None,
        "steps": stats.get("steps"),
        "restarts": stats.get("restarts"),
        "stats": stats,
        "t_max": result.trace.t_max,
        "events": [{"t": t, "objective": report(o)} for t, o in result.trace.events],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_solve(args) -> int:
    try:
        inst = read_mps(args.instance)
        params = params_from_args(args)
    except (OSError, ParseError, UnsupportedError, ValueError) as exc:
        print(f"ilpls: error: {args.instance}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    log.info("%s: %d vars, %d rows", inst.name, inst.num_vars, inst.num_cons)
    result = run(inst, params)
    deterministic = params.time_limit is None

    out = Path(args.out) if args.out else Path(Path(args.instance).stem + ".sol")
    try:
        if result.feasible:
            out.write_text(write_solution(inst, result.best, result.best_obj))
        if args.json:
            Path(args.json).write_text(_trace_json(inst, result, params, deterministic))
    except OSError as exc:
        print(f"ilpls: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if result.feasible:
        obj = inst.reported_objective(result.best_obj)
        print(f"{inst.name}: feasible objective={obj:g} steps={result.stats['steps']} "
              f"restarts={result.stats['restarts']} sol={out}")
        return EXIT_FEASIBLE
    print(f"{inst.name}: no feasible solution steps={result.stats['steps']}")
    return EXIT_NONE


# -- bench ----------------------------------------------------------------

def _bench_job(job: tuple) -> RunRecord:
    path, label, params = job
    name = Path(path).stem
    try:
        inst = read_mps(path)
    except (OSError, ParseError, UnsupportedError, ValueError) as exc:
        return RunRecord(name, label, error=f"{type(exc).__name__}: {exc}")
    try:
        result = run(inst, params)
    except Exception as exc:  # keep the matrix going
        return RunRecord(name, label, error=f"{type(exc).__name__}: {exc}")
    stats = {k: result.stats[k] for k in ("steps", "restarts") if k in result.stats}
    if params.time_limit is not None:
        stats["wall_time"] = result.stats.get("wall_time")
    return RunRecord(name, label, trace=result.trace, stats=stats)


def read_references(path) -> dict[str, float]:
    """CSV ``instance,objective`` with objectives in the file's own sense.

    References are compared with traces in the minimization sense, so a
    maximization instance's reference must be given negated.
    """
    refs = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0] == "instance":
                continue
            refs[row[0]] = float(row[1])
    return refs


def cmd_bench(args) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        print(f"ilpls: error: {root} is not a directory", file=sys.stderr)
        return EXIT_INPUT
    files = sorted(p for p in root.iterdir() if p.suffix.lower() == ".mps")
    if not files:
        print(f"ilpls: error: no .mps files in {root}", file=sys.stderr)
        return EXIT_INPUT
    presets = args.configs.split(",")
    unknown = [c for c in presets if c not in PRESETS]
    if unknown:
        print(f"ilpls: error: unknown preset(s) {unknown}; choose from {sorted(PRESETS)}", file=sys.stderr)
        return EXIT_INPUT
    try:
        base = params_from_args(args)
        refs = read_references(args.references) if args.references else None
    except (OSError, ValueError, IndexError) as exc:
        print(f"ilpls: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    seeds = args.seeds or [args.seed]
    jobs = []
    for preset in presets:
        for seed in seeds:
            label = f"{preset}/s{seed}"
            params = replace(base, seed=seed, **PRESETS[preset])
            jobs += [(str(f), label, params) for f in files]

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_bench_job, jobs))
    else:
        records = [_bench_job(j) for j in jobs]

    report = aggregate(records, refs)
    Path(args.json).write_text(report.to_json() + "\n")
    Path(args.csv).write_text(report.to_csv())
    sys.stdout.write(report.to_csv())
    errors = sum(1 for r in records if r.error)
    if errors:
        print(f"{errors} run(s) failed; see {args.json}", file=sys.stderr)
    return 0


# -- verify ---------------------------------------------------------------

def _int_list(s: str) -> tuple[int, ...]:
    if s.strip().lower() == "none":
        return ()
    try:
        vals = tuple(int(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of 1..4") from None
    if any(v not in (1, 2, 3, 4) for v in vals):
        raise argparse.ArgumentTypeError("items must be in 1..4")
    return vals


def cmd_verify(args) -> int:
    props = args.props if args.props is not None else (1, 2, 3, 4)
    if args.facts is not None:
        facts = args.facts
    else:
        facts = () if args.props is not None else (1, 2, 3, 4)
    verdicts = run_suites(props=props, facts=facts, seed=args.seed, scale=args.scale,
                          mutant=args.inject_bug, log=print)
    failed = [v for v in verdicts if not v.passed]
    if failed:
        text = dump_counterexamples(failed)
        if args.dump:
            Path(args.dump).write_text(text + "\n")
            print(f"counterexamples written to {args.dump}", file=sys.stderr)
        else:
            print(text, file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ilpls", description="Local search for integer linear programs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one MPS instance")
    s.add_argument("instance")
    _add_params(s)
    s.add_argument("--out", help="solution file (default: <instance>.sol in the working directory)")
    s.add_argument("--json", help="write run statistics and the incumbent trace here")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run a preset x seed x instance matrix")
    b.add_argument("directory")
    _add_params(b)
    b.add_argument("--configs", default="default", help=f"comma-separated presets: {','.join(PRESETS)}")
    b.add_argument("--seeds", type=int, nargs="+", help="seeds per preset (default: --seed)")
    b.add_argument("--jobs", type=int, default=1, help="worker processes")
    b.add_argument("--references", help="CSV of instance,objective reference values")
    b.add_argument("--json", default="bench_report.json")
    b.add_argument("--csv", default="bench_summary.csv")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="run the randomized property suites")
    v.add_argument("--props", type=_int_list, help="propositions to check, e.g. 1,2 (default: all)")
    v.add_argument("--facts", type=_int_list,
                   help="facts to check (default: all, or none when --props is given)")
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--scale", type=float, default=1.0, help="multiply every suite size by this")
    v.add_argument("--dump", help="write counterexamples as JSON to this path")
    v.add_argument("--inject-bug", choices=sorted(MUTANTS), help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
