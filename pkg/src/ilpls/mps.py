"""Free-format MPS reader and MIPLIB ``.sol`` writer for pure integer programs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .model import INF, Constraint, Instance

UNSUPPORTED_SECTIONS = {"SOS", "INDICATORS", "QUADOBJ", "QSECTION", "QMATRIX", "QCMATRIX",
                        "CSECTION", "GENCONS", "PWLOBJ", "PWLNAM", "PWLNATOBJ", "OBJNAME"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnsupportedError(ValueError):
    pass


@dataclass
class MpsDocument:
    """Raw MPS content before normalization to ``A x <= b``."""

    name: str = ""
    objective_row: str | None = None
    sense: str = "MIN"
    row_senses: dict[str, str] = field(default_factory=dict)
    columns: dict[str, dict[str, float]] = field(default_factory=dict)
    integer: set[str] = field(default_factory=set)
    rhs: dict[str, float] = field(default_factory=dict)
    ranges: dict[str, float] = field(default_factory=dict)
    lower: dict[str, float] = field(default_factory=dict)
    upper: dict[str, float] = field(default_factory=dict)
    row_lines: dict[str, int] = field(default_factory=dict)
    column_lines: dict[str, int] = field(default_factory=dict)

    def row_range(self, row: str) -> tuple[float, float]:
        """``(lo, hi)`` allowed for the activity of a constraint row."""
        sense = self.row_senses[row]
        b = self.rhs.get(row, 0.0)
        r = self.ranges.get(row)
        if sense == "L":
            return (-INF if r is None else b - abs(r)), b
        if sense == "G":
            return b, (INF if r is None else b + abs(r))
        if r is None or r == 0:
            return b, b
        return (b, b + r) if r > 0 else (b + r, b)


def _num(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected a number, got {tok!r}", lineno) from None


def _pairs(tokens: Sequence[str], lineno: int) -> list[tuple[str, float]]:
    # optional leading set name: odd token count means one is present
    if len(tokens) % 2 == 1:
        tokens = tokens[1:]
    if not tokens:
        raise ParseError("expected row/value pairs", lineno)
    return [(tokens[k], _num(tokens[k + 1], lineno)) for k in range(0, len(tokens), 2)]


def parse_document(text: str) -> MpsDocument:
    doc = MpsDocument()
    section = None
    in_int_block = False
    explicit_lower: set[str] = set()
    free_rows: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        tokens = line.split()
        if not raw[0].isspace():
            head = tokens[0].upper()
            if head in UNSUPPORTED_SECTIONS:
                raise UnsupportedError(f"section {head} is not supported (line {lineno})")
            if head == "NAME":
                doc.name = " ".join(tokens[1:])
                section = None
                continue
            if head == "OBJSENSE":
                section = "OBJSENSE"
                if len(tokens) > 1:
                    doc.sense = _sense(tokens[1], lineno)
                continue
            if head == "ENDATA":
                break
            if head not in {"ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS"}:
                raise ParseError(f"unknown section {tokens[0]!r}", lineno)
            section = head
            continue

        if section == "OBJSENSE":
            doc.sense = _sense(tokens[0], lineno)
        elif section == "ROWS":
            if len(tokens) != 2:
                raise ParseError("ROWS entry needs a type and a name", lineno)
            kind, name = tokens[0].upper(), tokens[1]
            if kind not in {"N", "L", "G", "E"}:
                raise ParseError(f"unknown row type {kind!r}", lineno)
            if name in doc.row_senses or name == doc.objective_row or name in free_rows:
                raise ParseError(f"duplicate row {name!r}", lineno)
            if kind == "N":
                if doc.objective_row is not None:
                    # extra free rows carry no constraint
                    free_rows.add(name)
                    continue
                doc.objective_row = name
            else:
                doc.row_senses[name] = kind
                doc.row_lines[name] = lineno
        elif section == "COLUMNS":
            if len(tokens) >= 3 and tokens[1].strip("'\"").upper() == "MARKER":
                marker = tokens[2].strip("'\"").upper()
                if marker == "INTORG":
                    in_int_block = True
                elif marker == "INTEND":
                    in_int_block = False
                else:
                    raise ParseError(f"unknown marker {tokens[2]!r}", lineno)
                continue
            if len(tokens) not in (3, 5):
                raise ParseError("COLUMNS entry needs a column and one or two row/value pairs", lineno)
            col = tokens[0]
            entries = doc.columns.setdefault(col, {})
            doc.column_lines.setdefault(col, lineno)
            if in_int_block:
                doc.integer.add(col)
            for k in range(1, len(tokens), 2):
                row, val = tokens[k], _num(tokens[k + 1], lineno)
                if row in free_rows:
                    continue
                if row != doc.objective_row and row not in doc.row_senses:
                    raise ParseError(f"column {col!r} references undeclared row {row!r}", lineno)
                entries[row] = entries.get(row, 0.0) + val
        elif section in ("RHS", "RANGES"):
            target = doc.rhs if section == "RHS" else doc.ranges
            for row, val in _pairs(tokens, lineno):
                if row in free_rows:
                    continue
                if row == doc.objective_row:
                    if section == "RANGES":
                        raise UnsupportedError(f"RANGES on objective row (line {lineno})")
                elif row not in doc.row_senses:
                    raise ParseError(f"{section} references undeclared row {row!r}", lineno)
                target[row] = val
        elif section == "BOUNDS":
            _bound(doc, tokens, lineno, explicit_lower)
        else:
            raise ParseError("data line outside of any section", lineno)

    if doc.objective_row is None:
        raise ParseError("no objective (N) row declared")
    return doc


def _sense(tok: str, lineno: int) -> str:
    t = tok.upper()
    if t in ("MIN", "MINIMIZE"):
        return "MIN"
    if t in ("MAX", "MAXIMIZE"):
        return "MAX"
    raise ParseError(f"unknown objective sense {tok!r}", lineno)


def _bound(doc: MpsDocument, tokens: list[str], lineno: int, explicit_lower: set[str]):
    kind = tokens[0].upper()
    valued = {"UP", "LO", "FX", "LI", "UI"}
    if kind in valued:
        if len(tokens) not in (3, 4):
            raise ParseError(f"{kind} bound needs a column and a value", lineno)
        col, val = tokens[-2], _num(tokens[-1], lineno)
    elif kind in {"FR", "MI", "PL", "BV"}:
        if len(tokens) == 4 or (len(tokens) == 3 and tokens[1] in doc.columns and tokens[2] not in doc.columns):
            col = tokens[-2]
        elif len(tokens) in (2, 3):
            col = tokens[-1]
        else:
            raise ParseError(f"malformed {kind} bound", lineno)
        val = None
    elif kind == "SC":
        raise UnsupportedError(f"semi-continuous bound (line {lineno})")
    else:
        raise ParseError(f"unknown bound type {kind!r}", lineno)
    if col not in doc.columns:
        raise ParseError(f"bound on undeclared column {col!r}", lineno)

    if kind in ("UP", "UI"):
        doc.upper[col] = val
        if val < 0 and col not in explicit_lower and doc.lower.get(col, 0.0) == 0.0:
            doc.lower[col] = -INF
    elif kind in ("LO", "LI"):
        doc.lower[col] = val
        explicit_lower.add(col)
    elif kind == "FX":
        doc.lower[col] = doc.upper[col] = val
        explicit_lower.add(col)
    elif kind == "FR":
        doc.lower[col], doc.upper[col] = -INF, INF
        explicit_lower.add(col)
    elif kind == "MI":
        doc.lower[col] = -INF
        explicit_lower.add(col)
    elif kind == "PL":
        doc.upper[col] = INF
    elif kind == "BV":
        doc.lower[col], doc.upper[col] = 0.0, 1.0
        explicit_lower.add(col)
    if kind in ("LI", "UI", "BV", "FX"):
        doc.integer.add(col)


def _inward(lo: float, hi: float) -> tuple:
    lo = lo if math.isinf(lo) else math.ceil(lo - 1e-9)
    hi = hi if math.isinf(hi) else math.floor(hi + 1e-9)
    return lo, hi


def to_instance(doc: MpsDocument) -> Instance:
    names = list(doc.columns)
    continuous = [c for c in names if c not in doc.integer]
    if continuous:
        raise UnsupportedError(f"continuous variables are not supported: {continuous[:5]}")
    index = {c: j for j, c in enumerate(names)}
    sign = -1.0 if doc.sense == "MAX" else 1.0

    cost = [sign * doc.columns[c].get(doc.objective_row, 0.0) for c in names]
    # MPS stores the negated objective constant as the objective row's rhs
    constant = -sign * doc.rhs.get(doc.objective_row, 0.0)

    row_terms: dict[str, list[tuple[int, float]]] = {r: [] for r in doc.row_senses}
    for c in names:
        j = index[c]
        for row, val in doc.columns[c].items():
            if row != doc.objective_row and val != 0.0:
                row_terms[row].append((j, val))

    rows, con_names = [], []
    for r in doc.row_senses:
        lo, hi = doc.row_range(r)
        terms = row_terms[r]
        if not terms:
            if lo > 1e-9 or hi < -1e-9:
                raise UnsupportedError(f"row {r!r} has no coefficients and is infeasible")
            continue
        if not math.isinf(hi):
            rows.append(Constraint(terms, hi))
            con_names.append(r if math.isinf(lo) else f"{r}#le")
        if not math.isinf(lo):
            rows.append(Constraint([(j, -a) for j, a in terms], -lo))
            con_names.append(r if math.isinf(hi) else f"{r}#ge")

    lower, upper = [], []
    for c in names:
        lo, hi = _inward(doc.lower.get(c, 0.0), doc.upper.get(c, INF))
        if lo > hi:
            raise UnsupportedError(f"column {c!r} has an empty integer domain [{lo}, {hi}]")
        lower.append(lo)
        upper.append(hi)

    return Instance(num_vars=len(names), rows=rows, cost=cost, lower=lower, upper=upper,
                    var_names=names, con_names=con_names, obj_constant=constant,
                    maximize=doc.sense == "MAX", name=doc.name)


def parse_mps(text: str) -> Instance:
    return to_instance(parse_document(text))


def read_mps(path) -> Instance:
    path = Path(path)
    inst = parse_mps(path.read_text())
    if not inst.name:
        inst.name = path.stem
    return inst


def _fmt(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def write_solution(inst: Instance, a: Sequence[int], obj: float) -> str:
    """MIPLIB solution text; ``obj`` is the internal (minimization) objective."""
    lines = [f"=obj= {_fmt(inst.reported_objective(obj))}"]
    lines += [f"{name} {int(v)}" for name, v in zip(inst.var_names, a)]
    return "\n".join(lines) + "\n"


def read_solution(text: str) -> tuple[float | None, dict[str, int]]:
    obj = None
    values: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        if tokens[0] == "=obj=":
            obj = _num(tokens[1], lineno)
            continue
        if len(tokens) < 2:
            raise ParseError("solution line needs a name and a value", lineno)
        val = _num(tokens[1], lineno)
        if not val.is_integer():
            raise ParseError(f"non-integral value for {tokens[0]!r}", lineno)
        values[tokens[0]] = int(val)
    return obj, values
