"""Pure-Python multivariate GCD over the integers.

Recursive content / primitive-part algorithm: a polynomial in ``x1..xn`` is
viewed as univariate in ``x1`` with coefficients in ``Z[x2..xn]``, the
contents are handled by recursion, and the primitive parts go through a
primitive pseudo-remainder sequence.  This module is deliberately
independent of the FLINT backend so the two can cross-check each other.
"""
from __future__ import annotations

from math import gcd as igcd

from .poly import MultiPoly, content_and_primitive

Poly = dict  # {exponent tuple: int}


def _add(f: Poly, g: Poly, sign: int = 1) -> Poly:
    out = dict(f)
    for m, c in g.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _mul(f: Poly, g: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _lead(f: Poly):
    m = max(f)
    return m, f[m]


def _exact_div(f: Poly, g: Poly) -> Poly:
    """Exact quotient f/g in lex order; raises if g does not divide f."""
    q: Poly = {}
    r = dict(f)
    gm, gc = _lead(g)
    while r:
        rm, rc = _lead(r)
        dm = tuple(a - b for a, b in zip(rm, gm))
        if any(e < 0 for e in dm) or rc % gc:
            raise ArithmeticError("not an exact division")
        t = {dm: rc // gc}
        q = _add(q, t)
        r = _add(r, _mul(t, g), -1)
    return q


def _to_univariate(f: Poly) -> dict[int, Poly]:
    out: dict[int, Poly] = {}
    for m, c in f.items():
        out.setdefault(m[0], {})[m[1:]] = c
    return out


def _from_univariate(u: dict[int, Poly]) -> Poly:
    return {(e,) + m: c for e, coeff in u.items() for m, c in coeff.items()}


def _content(u: dict[int, Poly], nrest: int) -> Poly:
    g: Poly = {}
    for coeff in u.values():
        g = poly_gcd(g, coeff, nrest)
        if len(g) == 1 and all(e == 0 for e in next(iter(g))) and abs(next(iter(g.values()))) == 1:
            break
    return g


def _prem(a: dict[int, Poly], b: dict[int, Poly]) -> dict[int, Poly]:
    """Pseudo-remainder of univariate polys with polynomial coefficients."""
    db = max(b)
    lb = b[db]
    r = {e: dict(c) for e, c in a.items()}
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        shift = dr - db
        new: dict[int, Poly] = {}
        for e, c in r.items():
            new[e] = _mul(c, lb)
        for e, c in b.items():
            t = _mul(c, lr)
            cur = new.get(e + shift, {})
            new[e + shift] = _add(cur, t, -1)
        r = {e: c for e, c in new.items() if c}
    return r


def poly_gcd(f: Poly, g: Poly, nvars: int) -> Poly:
    """GCD of integer polynomials in ``nvars`` variables, positive leading coefficient."""
    if not f:
        return _normalize_sign(dict(g))
    if not g:
        return _normalize_sign(dict(f))
    if nvars == 0:
        return {(): igcd(f[()], g[()])}
    uf, ug = _to_univariate(f), _to_univariate(g)
    cf, cg = _content(uf, nvars - 1), _content(ug, nvars - 1)
    c = poly_gcd(cf, cg, nvars - 1)
    a = {e: _exact_div(coef, cf) for e, coef in uf.items()}
    b = {e: _exact_div(coef, cg) for e, coef in ug.items()}
    if max(a) < max(b):
        a, b = b, a
    while b and max(b) > 0:
        r = _prem(a, b)
        if not r:
            break
        rc = _content(r, nvars - 1)
        a, b = b, {e: _exact_div(coef, rc) for e, coef in r.items()}
    if b and max(b) == 0:
        # constant remainder in x1: primitive parts are coprime in x1
        b = {0: {(0,) * (nvars - 1): 1}}
    result = _mul(_from_univariate(b), {(0,) + m: v for m, v in c.items()})
    return _normalize_sign(result)


def _normalize_sign(f: Poly) -> Poly:
    if not f:
        return f
    lead = max(f, key=lambda m: (sum(m), m))
    if f[lead] < 0:
        return {m: -c for m, c in f.items()}
    return f


def reference_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """GCD of two polynomials (up to a rational unit, returned primitive)."""
    if p.variables != q.variables:
        raise ValueError("variable mismatch")
    n = len(p.variables)
    fp = {m: int(c) for m, c in content_and_primitive(p)[1].to_dict().items()}
    fq = {m: int(c) for m, c in content_and_primitive(q)[1].to_dict().items()}
    g = poly_gcd(fp, fq, n)
    return MultiPoly(p.variables, g)
