"""Local search for pure integer linear programs."""

from __future__ import annotations

from .engine import Params, RunResult, run
from .model import Constraint, Instance, evaluate_objective, is_feasible
from .mps import ParseError, UnsupportedError, parse_mps, read_mps

__version__ = "0.1.0"

__all__ = [
    "Constraint",
    "Instance",
    "Params",
    "ParseError",
    "RunResult",
    "UnsupportedError",
    "evaluate_objective",
    "is_feasible",
    "parse_mps",
    "read_mps",
    "run",
]
