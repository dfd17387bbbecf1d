"""Exact linear algebra over the rationals.

Rows are scaled to integers and reduced by fraction-free Gauss-Jordan
elimination; after every row operation the row's integer content is divided
out, which keeps entries small without ever introducing fractions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from ..errors import InconsistentSystemError


@dataclass(frozen=True)
class LinearSolution:
    rank: int
    pivots: tuple[int, ...]
    rref: tuple[tuple[Fraction, ...], ...]
    nullspace: tuple[tuple[Fraction, ...], ...]
    particular: tuple[Fraction, ...] | None = field(default=None)


def _integer_row(row: Sequence) -> list[int]:
    fr = [Fraction(x) for x in row]
    den = 1
    for x in fr:
        den = lcm(den, x.denominator)
    return [int(x * den) for x in fr]


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    if g > 1:
        return [x // g for x in row]
    return row


def _eliminate(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """In-place fraction-free Gauss-Jordan on the first ``ncols`` columns."""
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = None
        best = None
        for i in range(r, nrows):
            v = rows[i][c]
            if v:
                size = abs(v)
                if best is None or size < best:
                    p, best = i, size
                    if size == 1:
                        break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        a = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            b = rows[i][c]
            if b:
                g = gcd(a, b)
                fa, fb = a // g, b // g
                rows[i] = _primitive([fa * x - fb * y for x, y in zip(rows[i], prow)])
        r += 1
        pivots.append(c)
    return rows, pivots


def solve_linear_exact(A: Sequence[Sequence], rhs: Sequence | None = None) -> LinearSolution:
    """Reduce ``A`` (optionally augmented with ``rhs``) to reduced row-echelon form.

    Without ``rhs`` this is nullspace mode; with ``rhs`` a particular solution
    (free variables set to zero) is returned as well.  The nullspace basis has
    one vector per free column, with a 1 in that column.
    """
    A = [list(row) for row in A]
    ncols = len(A[0]) if A else 0
    if any(len(row) != ncols for row in A):
        raise ValueError("ragged matrix")
    if rhs is not None:
        if len(rhs) != len(A):
            raise ValueError("right-hand side length does not match the row count")
        A = [row + [b] for row, b in zip(A, rhs)]
    rows = [_primitive(_integer_row(row)) for row in A if any(row)]
    rows, pivots = _eliminate(rows, ncols)
    rank = len(pivots)
    rref = []
    for i, c in enumerate(pivots):
        a = rows[i][c]
        rref.append(tuple(Fraction(x, a) for x in rows[i]))
    if rhs is not None:
        for row in rows[rank:]:
            if row[-1] != 0:
                raise InconsistentSystemError("linear system has no solution")
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rref[i][f]
        basis.append(tuple(v))
    particular = None
    if rhs is not None:
        x = [Fraction(0)] * ncols
        for i, c in enumerate(pivots):
            x[c] = rref[i][-1]
        particular = tuple(x)
    return LinearSolution(rank, tuple(pivots), tuple(rref), tuple(basis), particular)


def nullspace(A: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    return list(solve_linear_exact(A).nullspace)


def matrix_rank(A: Sequence[Sequence]) -> int:
    return solve_linear_exact(A).rank if A else 0


def determinant(A: Sequence[Sequence]) -> Fraction:
    """Exact determinant by Bareiss fraction-free elimination."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    den = 1
    for row in A:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    M = [[int(Fraction(x) * den) for x in row] for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return Fraction(sign * M[n - 1][n - 1], den ** n)
