"""Canonical text form for polynomials and rational functions.

The output is accepted by :func:`hcs_forge.algebra.parsing.parse_expr` and
re-parses to the identical object.
"""
from __future__ import annotations

from fractions import Fraction


def _monomial(variables, mono) -> str:
    parts = []
    for name, e in zip(variables, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_terms(variables, terms) -> str:
    if not terms:
        return "0"
    out = []
    for idx, (mono, c) in enumerate(terms):
        c = Fraction(c)
        neg = c < 0
        c = abs(c)
        m = _monomial(variables, mono)
        if not m:
            body = str(c)
        elif c == 1:
            body = m
        else:
            body = f"{c}*{m}"
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def format_poly(p) -> str:
    return _format_terms(p.variables, p.sorted_terms())


def _is_atom(variables, terms) -> bool:
    """True when the polynomial prints as one factor (no '+', '-', '*', '/')."""
    if len(terms) != 1:
        return False
    mono, c = terms[0]
    if c < 0:
        return False
    nvars = sum(1 for e in mono if e)
    if nvars == 0:
        return Fraction(c).denominator == 1
    return c == 1 and nvars == 1


def format_ratfun(f) -> str:
    num = f.num.sorted_terms()
    if f.den.terms == {(0,) * len(f.variables): 1}:
        return _format_terms(f.variables, num)
    den = f.den.sorted_terms()
    ns = _format_terms(f.variables, num)
    ds = _format_terms(f.variables, den)
    if len(num) > 1:
        ns = f"({ns})"
    if not _is_atom(f.variables, den):
        ds = f"({ds})"
    return f"{ns}/{ds}"
