"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`MultiPoly` pairs an ordered tuple of variable names with a FLINT
``fmpq_mpoly`` in graded lexicographic order (earlier variables rank higher).
Values are immutable; every operation returns a new polynomial.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import flint

Monomial = tuple[int, ...]


@lru_cache(maxsize=None)
def zring(variables: tuple[str, ...]) -> flint.fmpz_mpoly_ctx:
    return flint.fmpz_mpoly_ctx.get(variables, "deglex")


@lru_cache(maxsize=None)
def qring(variables: tuple[str, ...]) -> flint.fmpq_mpoly_ctx:
    return flint.fmpq_mpoly_ctx.get(variables, "deglex")


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, flint.fmpz):
        return Fraction(int(value))
    if isinstance(value, flint.fmpq):
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"not an exact rational: {value!r}")


def to_fmpq(value) -> flint.fmpq:
    q = to_fraction(value)
    return flint.fmpq(q.numerator, q.denominator)


def grlex_key(monomial: Monomial) -> tuple:
    """Sort key that places larger monomials (graded lex) first."""
    return (-sum(monomial), tuple(-e for e in monomial))


class MultiPoly:
    """Immutable polynomial in ``variables`` over the rationals."""

    __slots__ = ("variables", "_p")

    def __init__(self, variables: Iterable[str], terms: Mapping[Monomial, object] | None = None):
        self.variables = tuple(variables)
        ring = qring(self.variables)
        if terms is None:
            self._p = ring.from_dict({})
        else:
            data = {}
            for mono, coeff in terms.items():
                if len(mono) != len(self.variables):
                    raise ValueError(f"exponent vector {mono} does not match {len(self.variables)} variables")
                q = to_fmpq(coeff)
                if q != 0:
                    data[tuple(int(e) for e in mono)] = q
            self._p = ring.from_dict(data)

    @classmethod
    def _wrap(cls, variables: tuple[str, ...], p) -> "MultiPoly":
        obj = cls.__new__(cls)
        obj.variables = variables
        if isinstance(p, flint.fmpz_mpoly):
            p = qring(variables).from_dict(p.to_dict())
        obj._p = p
        return obj

    @classmethod
    def constant(cls, variables: Iterable[str], value) -> "MultiPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def gen(cls, variables: Iterable[str], name: str) -> "MultiPoly":
        variables = tuple(variables)
        mono = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise ValueError(f"unknown variable {name!r}")
        return cls(variables, {mono: 1})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        """Nonzero coefficients keyed by exponent vector."""
        return {m: to_fraction(c) for m, c in self._p.to_dict().items()}

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: grlex_key(mc[0]))

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.is_constant()

    def total_degree(self) -> int:
        return -1 if self.is_zero() else int(self._p.total_degree())

    def leading_term(self) -> tuple[Monomial, Fraction]:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        return self.sorted_terms()[0]

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        return MultiPoly.constant(self.variables, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return MultiPoly._wrap(self.variables, self._p + other._p)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._wrap(self.variables, -self._p)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return MultiPoly._wrap(self.variables, self._p - other._p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return MultiPoly._wrap(self.variables, self._p * other._p)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        return MultiPoly._wrap(self.variables, self._p ** k)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.variables == other.variables and self._p == other._p
        try:
            return self._p == self._coerce(other)._p
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.variables, tuple(sorted(self._p.to_dict().items()))))

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        other = self._coerce(other)
        q, r = divmod(self._p, other._p)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return MultiPoly._wrap(self.variables, q)

    def diff(self, var: str) -> "MultiPoly":
        if var not in self.variables:
            raise ValueError(f"unknown variable {var!r}")
        return MultiPoly._wrap(self.variables, self._p.derivative(var))

    def __call__(self, point: Mapping[str, object]) -> Fraction:
        missing = [v for v in self.variables if v not in point]
        if missing:
            raise ValueError(f"point does not assign {missing}")
        if not self.variables:
            return self.terms.get((), Fraction(0))
        return to_fraction(self._p(*[to_fmpq(point[v]) for v in self.variables]))

    def __str__(self):
        from .printing import format_poly
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, {list(self.variables)})"


def content_and_primitive(p: MultiPoly) -> tuple[Fraction, "flint.fmpz_mpoly"]:
    """Split ``p`` as ``c * q`` with ``q`` integral, primitive and positively led."""
    if p.is_zero():
        return Fraction(0), zring(p.variables).from_dict({})
    d = p._p.to_dict()
    den = 1
    for c in d.values():
        den = den * int(c.q) // _gcd(den, int(c.q))
    ints = {m: int(c.p) * (den // int(c.q)) for m, c in d.items()}
    g = 0
    for v in ints.values():
        g = _gcd(g, v)
    lead = max(ints, key=lambda m: (sum(m), m))
    if ints[lead] < 0:
        g = -g
    return Fraction(g, den), zring(p.variables).from_dict({m: v // g for m, v in ints.items()})


def _gcd(a: int, b: int) -> int:
    from math import gcd
    return gcd(a, b)
