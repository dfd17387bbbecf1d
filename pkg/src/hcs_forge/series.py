"""Truncated power-series solutions of holonomic systems at a rational point.

Solutions are sought as polynomials of total degree <= D in the shifted
variables s = t - p.  Each operator applied to such a jet is exact through
total degree D - 2, which yields a finite linear system over the rationals;
its nullspace is the space of truncated solutions.  Products of solutions
through degree D then determine the quadratic relations among them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

from .algebra import RatFun, determinant, solve_linear_exact
from .algebra.poly import qring, to_fmpq, to_fraction
from .errors import DomainError, PoleError, QuadricError
from .holonomic import HolonomicSystem
from .k3 import format_point

Monomial = tuple[int, ...]
Series = dict  # {Monomial: Fraction}


def monomials_upto(nvars: int, degree: int) -> list[Monomial]:
    """Exponent vectors of total degree <= ``degree``: by degree, then lex descending."""
    out = []
    for d in range(degree + 1):
        block = [m for m in itertools.product(range(d + 1), repeat=nvars) if sum(m) == d]
        block.sort(reverse=True)
        out.extend(block)
    return out


@dataclass(frozen=True)
class JetSpace:
    variables: tuple[str, ...]
    base_point: tuple[tuple[str, Fraction], ...]
    order: int
    monomials: tuple[Monomial, ...] = field(init=False)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation order must be nonnegative")
        names = [k for k, _ in self.base_point]
        if names != list(self.variables):
            raise ValueError("base point must assign every variable, in order")
        object.__setattr__(self, "monomials", tuple(monomials_upto(len(self.variables), self.order)))

    @classmethod
    def at(cls, variables: Sequence[str], point: Mapping[str, object], order: int, excluded=()) -> "JetSpace":
        missing = [v for v in variables if v not in point]
        if missing:
            raise ValueError(f"base point does not assign {missing}")
        bp = tuple((v, Fraction(point[v])) for v in variables)
        bad = [p for p in excluded if p(dict(bp)) == 0]
        if bad:
            raise DomainError(f"base point {format_point(dict(bp))} lies on the excluded locus: "
                              + ", ".join(f"{p} = 0" for p in bad))
        return cls(tuple(variables), bp, order)

    @property
    def point(self) -> dict[str, Fraction]:
        return dict(self.base_point)

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def index(self) -> dict[Monomial, int]:
        return {m: i for i, m in enumerate(self.monomials)}


def _truncate(p, degree: int):
    d = {m: c for m, c in p.to_dict().items() if sum(m) <= degree}
    return p.context().from_dict(d)


def taylor(f: RatFun, point: Mapping[str, object], degree: int) -> Series:
    """Taylor coefficients of ``f`` at ``point`` in shifted variables, through ``degree``."""
    v = f.variables
    ring = qring(v)
    shifted = [g + to_fmpq(point[name]) for g, name in zip(ring.gens(), v)]

    def shift(p):
        q = ring.from_dict(p.to_dict())
        return q.compose(*shifted) if v else q

    num = _truncate(shift(f._n), degree)
    den = shift(f._d)
    zero = (0,) * len(v)
    d0 = den.to_dict().get(zero, 0)
    if d0 == 0:
        raise PoleError(f"{f} has a pole at {format_point(point)}")
    # 1/den = (1/d0) * sum_m (-u)^m with u = den/d0 - 1 of order >= 1
    u = _truncate(den / d0 - 1, degree)
    inv = ring.from_dict({zero: 1})
    power = ring.from_dict({zero: 1})
    for _ in range(degree):
        power = _truncate(power * (-u), degree)
        if power.is_zero():
            break
        inv = inv + power
    result = _truncate(num * inv / d0, degree)
    return {m: to_fraction(c) for m, c in result.to_dict().items()}


def series_vector(f: RatFun, js: JetSpace) -> tuple[Fraction, ...]:
    """Coefficient vector of ``f`` in the jet space's monomial basis."""
    s = taylor(f, js.point, js.order)
    return tuple(s.get(m, Fraction(0)) for m in js.monomials)


def jet_constraints(system: HolonomicSystem, js: JetSpace) -> list[list[Fraction]]:
    """Linear conditions on jet coefficients, one row per (operator, monomial of degree <= D-2)."""
    if js.variables != system.variables:
        raise ValueError("jet space and system use different variables")
    n = system.n
    D = js.order
    top = D - 2
    if top < 0:
        return []
    bad = [p for p in system.excluded if p(js.point) == 0]
    if bad:
        raise DomainError(f"base point {format_point(js.point)} lies on the excluded locus: "
                          + ", ".join(f"{p} = 0" for p in bad))
    unknowns = js.monomials
    rows_index = {m: i for i, m in enumerate(monomials_upto(n, top))}
    nrows = len(rows_index)
    matrix: list[list[Fraction]] = []
    for op in system.operators:
        terms = []  # (series, derivative multi-index)
        for a in range(n):
            for b in range(n):
                c = op.second_order[a][b]
                if not c.is_zero():
                    terms.append((taylor(c, js.point, top), (a, b)))
        for p in range(n):
            c = op.first_order[p]
            if not c.is_zero():
                terms.append((taylor(c, js.point, top), (p,)))
        if not op.zeroth_order.is_zero():
            terms.append((taylor(op.zeroth_order, js.point, top), ()))
        block = [[Fraction(0)] * len(unknowns) for _ in range(nrows)]
        for col, alpha in enumerate(unknowns):
            for series, deriv in terms:
                mono = list(alpha)
                factor = 1
                for var in deriv:
                    factor *= mono[var]
                    mono[var] -= 1
                if factor == 0:
                    continue
                base = tuple(mono)
                for gamma, c in series.items():
                    beta = tuple(x + y for x, y in zip(gamma, base))
                    r = rows_index.get(beta)
                    if r is not None:
                        block[r][col] += factor * c
        matrix.extend(row for row in block if any(row))
    return matrix


@dataclass(frozen=True)
class SolutionBasis:
    jet_space: JetSpace
    basis: tuple[tuple[Fraction, ...], ...]

    def __len__(self):
        return len(self.basis)

    def transformed(self, T: Sequence[Sequence]) -> "SolutionBasis":
        """Basis with new_k = sum_l T[k][l] old_l."""
        new = []
        for row in T:
            vec = [Fraction(0)] * self.jet_space.dimension
            for coeff, old in zip(row, self.basis):
                coeff = Fraction(coeff)
                if coeff:
                    vec = [x + coeff * y for x, y in zip(vec, old)]
            new.append(tuple(vec))
        return SolutionBasis(self.jet_space, tuple(new))


def _nullity(system: HolonomicSystem, js: JetSpace):
    A = jet_constraints(system, js)
    if not A:
        eye = [tuple(Fraction(int(i == j)) for j in range(js.dimension)) for i in range(js.dimension)]
        return js.dimension, eye
    sol = solve_linear_exact(A)
    return len(sol.nullspace), list(sol.nullspace)


def solution_rank(system: HolonomicSystem, point: Mapping[str, object], order: int) -> int:
    """Dimension of the space of degree-``order`` jets annihilated by the system."""
    js = JetSpace.at(system.variables, point, order, system.excluded)
    return _nullity(system, js)[0]


def solution_basis(system: HolonomicSystem, point: Mapping[str, object], order: int) -> SolutionBasis:
    js = JetSpace.at(system.variables, point, order, system.excluded)
    return SolutionBasis(js, tuple(_nullity(system, js)[1]))


def explicit_basis(functions: Sequence[RatFun], point: Mapping[str, object], order: int) -> SolutionBasis:
    """Jets of known solution functions, for comparison with computed bases."""
    variables = functions[0].variables
    js = JetSpace.at(variables, point, order)
    return SolutionBasis(js, tuple(series_vector(f, js) for f in functions))


@dataclass(frozen=True)
class QuadricForm:
    """Symmetric matrix B with sum B_ab w_a w_b = 0, scaled to coprime integers."""

    matrix: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_matrix(cls, M: Sequence[Sequence]) -> "QuadricForm":
        M = [[Fraction(x) for x in row] for row in M]
        flat = [x for row in M for x in row if x]
        if not flat:
            raise ValueError("quadric form must be nonzero")
        from math import gcd, lcm
        den = 1
        for x in flat:
            den = lcm(den, x.denominator)
        g = 0
        for x in flat:
            g = gcd(g, int(x * den))
        scale = Fraction(den, g)
        if flat[0] < 0:
            scale = -scale
        return cls(tuple(tuple(x * scale for x in row) for row in M))

    @property
    def size(self) -> int:
        return len(self.matrix)

    def determinant(self) -> Fraction:
        return determinant(self.matrix)

    def is_nondegenerate(self) -> bool:
        return self.determinant() != 0

    def proportional_to(self, other: Sequence[Sequence]) -> bool:
        return self == QuadricForm.from_matrix(other)

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.matrix]


def _truncated_product(u: Sequence[Fraction], v: Sequence[Fraction], monos, index, degree) -> list[Fraction]:
    out = [Fraction(0)] * len(monos)
    nz_u = [(monos[i], x) for i, x in enumerate(u) if x]
    nz_v = [(monos[i], x) for i, x in enumerate(v) if x]
    for mu, x in nz_u:
        du = sum(mu)
        for mv, y in nz_v:
            if du + sum(mv) <= degree:
                out[index[tuple(a + b for a, b in zip(mu, mv))]] += x * y
    return out


def quadric_relations(basis: SolutionBasis) -> list[QuadricForm]:
    """Basis of symmetric B with sum_ab B_ab w_a w_b = 0 through the truncation order."""
    js = basis.jet_space
    monos = js.monomials
    index = js.index()
    k = len(basis)
    pairs = [(a, b) for a in range(k) for b in range(a, k)]
    columns = []
    for a, b in pairs:
        prod = _truncated_product(basis.basis[a], basis.basis[b], monos, index, js.order)
        mult = 1 if a == b else 2
        columns.append([mult * x for x in prod])
    A = [[columns[c][r] for c in range(len(pairs))] for r in range(len(monos))]
    forms = []
    for vec in solve_linear_exact(A).nullspace:
        M = [[Fraction(0)] * k for _ in range(k)]
        for (a, b), x in zip(pairs, vec):
            M[a][b] = M[b][a] = x
        forms.append(QuadricForm.from_matrix(M))
    return forms


def recover_quadric(basis: SolutionBasis) -> QuadricForm:
    """The unique (up to scale) quadratic relation; QuadricError unless it is unique."""
    forms = quadric_relations(basis)
    if len(forms) != 1:
        raise QuadricError(len(forms))
    return forms[0]


@dataclass
class QuadricReport:
    base_point: dict[str, Fraction]
    order: int
    expected_rank: int
    rank: int
    rank_prev: int
    quadric_dim: int | None
    quadric: QuadricForm | None
    det: Fraction | None

    @property
    def passed(self) -> bool:
        return (
            self.rank == self.expected_rank
            and self.rank_prev == self.expected_rank
            and self.quadric_dim == 1
            and self.det is not None
            and self.det != 0
        )

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        return {
            "base_point": {k: str(v) for k, v in self.base_point.items()},
            "order": self.order,
            "expected_rank": self.expected_rank,
            "rank": self.rank,
            "rank_prev": self.rank_prev,
            "quadric_dim": self.quadric_dim,
            "quadric": self.quadric.to_strings() if self.quadric is not None else None,
            "det": str(self.det) if self.det is not None else None,
            "unchecked": ["isometry of the quadric with the transcendental lattice pairing (needs explicit cycles)"],
            "verdict": self.verdict,
        }

    def to_text(self) -> str:
        lines = [
            f"base point: {format_point(self.base_point)}",
            f"order D = {self.order}: rank {self.rank} (D-1: {self.rank_prev}), expected {self.expected_rank}",
            f"quadric relations: {self.quadric_dim}",
        ]
        if self.quadric is not None:
            lines.append("B =")
            lines.extend("  [" + ", ".join(row) + "]" for row in self.quadric.to_strings())
            lines.append(f"det B = {self.det}")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def verify_quadric_condition(system: HolonomicSystem, point: Mapping[str, object], order: int) -> QuadricReport:
    js = JetSpace.at(system.variables, point, order, system.excluded)
    rank, vectors = _nullity(system, js)
    prev_js = JetSpace.at(system.variables, point, order - 1, system.excluded)
    rank_prev = _nullity(system, prev_js)[0]
    if rank != system.declared_rank:
        # a basis of the wrong size cannot certify anything
        return QuadricReport(js.point, order, system.declared_rank, rank, rank_prev, None, None, None)
    forms = quadric_relations(SolutionBasis(js, tuple(vectors)))
    quadric = forms[0] if len(forms) == 1 else None
    det = quadric.determinant() if quadric is not None else None
    return QuadricReport(js.point, order, system.declared_rank, rank, rank_prev, len(forms), quadric, det)
