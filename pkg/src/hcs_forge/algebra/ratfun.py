"""Normalized rational functions over the rationals.

Canonical form: numerator and denominator are integer polynomials with no
common factor (integer content included), the denominator's leading
coefficient in graded lex order is positive, and zero is ``0/1``.  Two
equal rational functions therefore compare equal structurally.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

import flint

from ..errors import PoleError
from .poly import MultiPoly, content_and_primitive, qring, to_fmpq, to_fraction, zring


def _canon(n, d):
    if d.is_zero():
        raise PoleError("zero denominator")
    ring = d.context()
    if n.is_zero():
        return n, ring.from_dict({(0,) * ring.nvars(): 1})
    g = n.gcd(d)
    if not g.is_one():
        n = n // g
        d = d // g
    if d.leading_coefficient() < 0:
        n = -n
        d = -d
    return n, d


class RatFun:
    """Quotient of two polynomials in a fixed ordered list of variables."""

    __slots__ = ("variables", "_n", "_d", "_hash")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        variables = num.variables
        if den is None:
            den = MultiPoly.constant(variables, 1)
        if den.variables != variables:
            raise ValueError("numerator and denominator use different variables")
        cn, pn = content_and_primitive(num)
        cd, pd = content_and_primitive(den)
        if cd == 0:
            raise PoleError("zero denominator")
        ratio = cn / cd
        n = pn * ratio.numerator
        d = pd * ratio.denominator
        self._set(variables, *_canon(n, d))

    def _set(self, variables, n, d):
        self.variables = variables
        self._n = n
        self._d = d
        self._hash = None

    @classmethod
    def _make(cls, variables: tuple[str, ...], n, d, canonical: bool = False) -> "RatFun":
        obj = cls.__new__(cls)
        if canonical:
            obj._set(variables, n, d)
        else:
            obj._set(variables, *_canon(n, d))
        return obj

    @classmethod
    def constant(cls, variables: Iterable[str], value) -> "RatFun":
        variables = tuple(variables)
        q = to_fraction(value)
        ring = zring(variables)
        zero = (0,) * len(variables)
        return cls._make(variables, ring.from_dict({zero: q.numerator}), ring.from_dict({zero: q.denominator}), canonical=True)

    @classmethod
    def gen(cls, variables: Iterable[str], name: str) -> "RatFun":
        variables = tuple(variables)
        if name not in variables:
            raise ValueError(f"unknown variable {name!r}")
        ring = zring(variables)
        return cls._make(variables, ring.gens()[variables.index(name)], ring.from_dict({(0,) * len(variables): 1}), canonical=True)

    @property
    def num(self) -> MultiPoly:
        return MultiPoly._wrap(self.variables, self._n)

    @property
    def den(self) -> MultiPoly:
        return MultiPoly._wrap(self.variables, self._d)

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def is_constant(self) -> bool:
        return self._n.is_constant() and self._d.is_constant()

    def is_polynomial(self) -> bool:
        """True when the denominator is constant (a polynomial over the rationals)."""
        return self._d.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return Fraction(int(self._n.coeffs()[0]) if not self._n.is_zero() else 0, int(self._d.coeffs()[0]))

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "RatFun":
        if isinstance(other, RatFun):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return RatFun(other)
        return RatFun.constant(self.variables, other)

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if o._n.is_zero():
            return self
        if self._n.is_zero():
            return o
        if self._d == o._d:
            return RatFun._make(self.variables, self._n + o._n, self._d)
        g = self._d.gcd(o._d)
        if g.is_one():
            return RatFun._make(self.variables, self._n * o._d + o._n * self._d, self._d * o._d)
        sd = self._d // g
        od = o._d // g
        return RatFun._make(self.variables, self._n * od + o._n * sd, sd * o._d)

    __radd__ = __add__

    def __neg__(self):
        return RatFun._make(self.variables, -self._n, self._d, canonical=True)

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self._n.is_zero() or o._n.is_zero():
            return RatFun.constant(self.variables, 0)
        n1, d1, n2, d2 = self._n, self._d, o._n, o._d
        g1 = n1.gcd(d2)
        if not g1.is_one():
            n1, d2 = n1 // g1, d2 // g1
        g2 = n2.gcd(d1)
        if not g2.is_one():
            n2, d1 = n2 // g2, d1 // g2
        n, d = n1 * n2, d1 * d2
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return RatFun._make(self.variables, n, d, canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self._n.is_zero():
            raise PoleError("division by the zero rational function")
        n, d = self._d, self._n
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return RatFun._make(self.variables, n, d, canonical=True)

    def __truediv__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return self.inverse() ** (-k)
        return RatFun._make(self.variables, self._n ** k, self._d ** k, canonical=True)

    def __eq__(self, other):
        if isinstance(other, RatFun):
            return self.variables == other.variables and self._n == other._n and self._d == other._d
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._n == o._n and self._d == o._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, str(self._n), str(self._d)))
        return self._hash

    # calculus and evaluation ------------------------------------------------

    def diff(self, var: str) -> "RatFun":
        if var not in self.variables:
            raise ValueError(f"unknown variable {var!r}")
        n, d = self._n, self._d
        dn = n.derivative(var)
        if d.is_constant():
            return RatFun._make(self.variables, dn, d)
        dd = d.derivative(var)
        # d/dx (n/d) = (n' d - n d') / d^2; cancel gcd(d, d') first
        g = d.gcd(dd)
        dg = d // g
        return RatFun._make(self.variables, dn * dg - n * (dd // g), d * dg)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        missing = [v for v in self.variables if v not in point]
        if missing:
            raise ValueError(f"point does not assign {missing}")
        args = [to_fmpq(point[v]) for v in self.variables]
        if not self.variables:
            return self.constant_value()
        ring = qring(self.variables)
        den = ring.from_dict(self._d.to_dict())(*args)
        if den == 0:
            raise PoleError(f"{self} has a pole at {dict(point)}")
        return to_fraction(ring.from_dict(self._n.to_dict())(*args) / den)

    def __str__(self):
        from .printing import format_ratfun
        return format_ratfun(self)

    def __repr__(self):
        return f"RatFun({str(self)!r}, {list(self.variables)})"


def normalize(f: RatFun) -> RatFun:
    """Return the canonical representative of ``f`` (a no-op on canonical input)."""
    n, d = _canon(f._n, f._d)
    return RatFun._make(f.variables, n, d, canonical=True)


def raw_quotient(num: MultiPoly, den: MultiPoly) -> RatFun:
    """Build ``num/den`` without cancelling; only integer scaling is applied."""
    if num.variables != den.variables:
        raise ValueError("numerator and denominator use different variables")
    cn, pn = content_and_primitive(num)
    cd, pd = content_and_primitive(den)
    if cd == 0:
        raise PoleError("zero denominator")
    ratio = cn / cd
    return RatFun._make(num.variables, pn * ratio.numerator, pd * ratio.denominator, canonical=True)


def differentiate(f: RatFun, var: str) -> RatFun:
    return f.diff(var)


def evaluate(f: RatFun, point: Mapping[str, object]) -> Fraction:
    return f.evaluate(point)


def _images_for(f_vars, bindings, target_vars):
    images = []
    for v in f_vars:
        if v in bindings:
            img = bindings[v]
            if not isinstance(img, RatFun):
                img = RatFun.constant(target_vars, img)
            if img.variables != target_vars:
                raise ValueError(f"binding for {v!r} uses variables {img.variables}, expected {target_vars}")
        elif v in target_vars:
            img = RatFun.gen(target_vars, v)
        else:
            raise ValueError(f"no binding for variable {v!r}")
        images.append(img)
    return images


def _compose_poly(p, images, ring):
    """Evaluate integer polynomial ``p`` at rational-function ``images``.

    Returns ``(N, D)`` in ``ring`` with ``p(images) = N / D``; ``D`` is the
    product of image denominators raised to the per-variable degrees of ``p``.
    """
    one = ring.from_dict({(0,) * ring.nvars(): 1})
    degs = [int(e) for e in p.degrees()] if not p.is_zero() else [0] * len(images)
    npow = [[one] for _ in images]
    dpow = [[one] for _ in images]
    for k, img in enumerate(images):
        for _ in range(degs[k]):
            npow[k].append(npow[k][-1] * img._n)
            dpow[k].append(dpow[k][-1] * img._d)
    total = ring.from_dict({})
    for mono, c in zip(p.monoms(), p.coeffs()):
        term = one * int(c)
        for k, e in enumerate(mono):
            if degs[k]:
                term = term * npow[k][e] * dpow[k][degs[k] - e]
        total += term
    den = one
    for k in range(len(images)):
        den = den * dpow[k][degs[k]]
    return total, den


def substitute(f: RatFun, bindings: Mapping[str, object], target_variables: Iterable[str] | None = None) -> RatFun:
    """Compose ``f`` with the rational functions in ``bindings``.

    Unbound variables map to the same-named variable of the target ring. The
    target ring is taken from the bindings unless given explicitly.
    """
    if target_variables is None:
        found = {b.variables for b in bindings.values() if isinstance(b, RatFun)}
        if len(found) > 1:
            raise ValueError("bindings use inconsistent variable lists")
        target = found.pop() if found else f.variables
    else:
        target = tuple(target_variables)
    images = _images_for(f.variables, bindings, target)
    ring = zring(target)
    nn, nd = _compose_poly(f._n, images, ring)
    dn, dd = _compose_poly(f._d, images, ring)
    if dn.is_zero():
        raise PoleError(f"denominator of {f} vanishes identically after substitution")
    return RatFun._make(target, nn * dd, nd * dn)


def clear_denominators(fs: Iterable[RatFun]) -> list[RatFun]:
    """Scale a coefficient list to coprime integer polynomials.

    The list is multiplied by the lcm of the denominators, divided by the gcd
    of the resulting numerators, and its sign fixed so the first nonzero entry
    has a positive leading coefficient.
    """
    fs = list(fs)
    live = [f for f in fs if not f.is_zero()]
    if not live:
        return fs
    variables = live[0].variables
    L = live[0]._d
    for f in live[1:]:
        L = L * (f._d // L.gcd(f._d))
    nums = [f._n * (L // f._d) for f in fs]
    G = None
    for p in nums:
        if not p.is_zero():
            G = p if G is None else G.gcd(p)
    first = next(p for p in nums if not p.is_zero())
    if (first // G).leading_coefficient() < 0:
        G = -G
    ring = zring(variables)
    one = ring.from_dict({(0,) * len(variables): 1})
    return [RatFun._make(variables, p // G, one, canonical=True) for p in nums]
