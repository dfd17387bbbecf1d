"""Plain-text metric files.

    vars: a b c
    exclude: a-b; b-c
    1; 0; -a/(2*c)
    0; ...; ...
    ...

Blank lines and ``#`` comments are ignored.  ``exclude:`` may repeat.
"""
from __future__ import annotations

from pathlib import Path

from .algebra import parse_expr
from .errors import ParseError
from .tensors import Metric


def parse_metric(text: str) -> Metric:
    variables = None
    excluded: list[str] = []
    rows: list[list[str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        key = head.strip().lower()
        if sep and key == "vars":
            if variables is not None:
                raise ParseError(f"line {lineno}: duplicate vars header", 0, raw)
            variables = tuple(rest.split())
            if not variables:
                raise ParseError(f"line {lineno}: empty variable list", 0, raw)
            continue
        if sep and key == "exclude":
            excluded.extend(p.strip() for p in rest.split(";") if p.strip())
            continue
        if variables is None:
            raise ParseError(f"line {lineno}: expected 'vars:' header first", 0, raw)
        rows.append([c.strip() for c in line.split(";")])
    if variables is None:
        raise ParseError("missing 'vars:' header", 0, text)
    n = len(variables)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ParseError(f"expected {n} rows of {n} entries", 0, text)
    comps = [[parse_expr(e, variables) for e in row] for row in rows]
    polys = [parse_expr(p, variables).num for p in excluded]
    return Metric.from_rows(variables, comps, polys)


def format_metric(g: Metric) -> str:
    lines = ["vars: " + " ".join(g.variables)]
    if g.excluded:
        lines.append("exclude: " + "; ".join(str(p) for p in g.excluded))
    for i in range(g.n):
        lines.append("; ".join(str(g[i, j]) for j in range(g.n)))
    return "\n".join(lines) + "\n"


def load_metric(path) -> Metric:
    return parse_metric(Path(path).read_text())
