"""Curvature of holomorphic metrics with rational-function components.

Conventions (indices 0-based in code)::

    Gamma^j_{ik} = 1/2 g^{jl} (d_k g_il + d_i g_kl - d_l g_ik)
    R^l_{ijk}   = d_j Gamma^l_{ki} - d_k Gamma^l_{ji}
                  + Gamma^l_{jr} Gamma^r_{ki} - Gamma^l_{kr} Gamma^r_{ji}
    R_ij        = R^l_{ilj},    R = g^{ij} R_ij
    S_ik        = (R_ik - R g_ik / (2(n-1))) / (n-2)
    W^j_{ikl}   = R^j_{ikl} + S_ik delta^j_l - S_il delta^j_k
                  + g_ik g^{jm} S_ml - g_il g^{jm} S_mk
    C_ijk       = (nabla_i S)_jk - (nabla_j S)_ik

With these conventions the unit sphere has R_ij = (n-1) g_ij.  Every tensor
identity is decided by exact normalization to zero.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from ._parallel import pmap
from .algebra import MultiPoly, RatFun, parse_expr
from .errors import DimensionError, SingularMetricError

UPPER, LOWER = "u", "l"


@dataclass(frozen=True, eq=False)
class Metric:
    """Symmetric matrix of rational functions, with the polynomials it must avoid."""

    variables: tuple[str, ...]
    components: tuple[tuple[RatFun, ...], ...]
    excluded: tuple[MultiPoly, ...] = ()

    def __post_init__(self):
        n = len(self.variables)
        if len(self.components) != n or any(len(row) != n for row in self.components):
            raise DimensionError(f"metric must be {n}x{n} over {self.variables}")
        for i, j in itertools.combinations(range(n), 2):
            if self.components[i][j] != self.components[j][i]:
                raise ValueError(f"metric is not symmetric at ({i}, {j})")
        for row in self.components:
            for entry in row:
                if entry.variables != self.variables:
                    raise ValueError("metric entries must use the metric's variables")

    @classmethod
    def from_rows(cls, variables: Iterable[str], rows: Sequence[Sequence], excluded: Iterable = ()) -> "Metric":
        """Build a metric from RatFun, numbers or expression strings."""
        variables = tuple(variables)

        def conv(x):
            if isinstance(x, RatFun):
                return x
            if isinstance(x, str):
                return parse_expr(x, variables)
            return RatFun.constant(variables, x)

        comps = tuple(tuple(conv(x) for x in row) for row in rows)
        excl = []
        for p in excluded:
            if isinstance(p, str):
                p = parse_expr(p, variables).num
            excl.append(p)
        return cls(variables, comps, tuple(excl))

    @property
    def n(self) -> int:
        return len(self.variables)

    def __getitem__(self, ij) -> RatFun:
        i, j = ij
        return self.components[i][j]

    def __eq__(self, other):
        if not isinstance(other, Metric):
            return NotImplemented
        return self.variables == other.variables and self.components == other.components

    def __hash__(self):
        return hash((self.variables, self.components))

    def scaled(self, factor: RatFun) -> "Metric":
        return Metric(self.variables, tuple(tuple(factor * x for x in row) for row in self.components), self.excluded)

    def determinant(self) -> RatFun:
        return ratfun_determinant(self.components, self.variables)

    def __str__(self):
        rows = ["; ".join(str(x) for x in row) for row in self.components]
        return f"Metric[{' '.join(self.variables)}](" + " | ".join(rows) + ")"


@dataclass(frozen=True, eq=False)
class TensorField:
    """Dense multi-index array of rational functions, stored row-major."""

    variance: str
    variables: tuple[str, ...]
    components: tuple[RatFun, ...]

    def __post_init__(self):
        if set(self.variance) - {UPPER, LOWER}:
            raise ValueError(f"variance must be a string over 'u'/'l', got {self.variance!r}")
        if len(self.components) != len(self.variables) ** len(self.variance):
            raise DimensionError("component count does not match the tensor shape")

    @classmethod
    def from_function(cls, variance: str, variables: tuple[str, ...], fn) -> "TensorField":
        n = len(variables)
        comps = tuple(fn(*idx) for idx in itertools.product(range(n), repeat=len(variance)))
        return cls(variance, variables, comps)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def rank(self) -> int:
        return len(self.variance)

    def _offset(self, idx) -> int:
        off = 0
        for k in idx:
            off = off * self.n + k
        return off

    def __getitem__(self, idx) -> RatFun:
        if isinstance(idx, int):
            idx = (idx,)
        if len(idx) != self.rank:
            raise IndexError(f"expected {self.rank} indices")
        return self.components[self._offset(idx)]

    def indices(self):
        return itertools.product(range(self.n), repeat=self.rank)

    def nonzero(self):
        for idx in self.indices():
            v = self[idx]
            if not v.is_zero():
                yield idx, v

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        return (self.variance, self.variables, self.components) == (other.variance, other.variables, other.components)

    def __hash__(self):
        return hash((self.variance, self.variables, self.components))

    def to_dict(self) -> dict:
        return {
            "variance": ["upper" if v == UPPER else "lower" for v in self.variance],
            "variables": list(self.variables),
            "components": [str(c) for c in self.components],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "TensorField":
        variables = tuple(data["variables"])
        variance = "".join(UPPER if v == "upper" else LOWER for v in data["variance"])
        comps = tuple(parse_expr(s, variables) for s in data["components"])
        return cls(variance, variables, comps)


def ratfun_determinant(rows: Sequence[Sequence[RatFun]], variables: tuple[str, ...]) -> RatFun:
    """Determinant by Gaussian elimination over the rational-function field."""
    M = [list(r) for r in rows]
    n = len(M)
    det = RatFun.constant(variables, 1)
    for c in range(n):
        p = next((r for r in range(c, n) if not M[r][c].is_zero()), None)
        if p is None:
            return RatFun.constant(variables, 0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det = det * M[c][c]
        inv = M[c][c].inverse()
        for r in range(c + 1, n):
            if not M[r][c].is_zero():
                f = M[r][c] * inv
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def _invert(rows, variables):
    n = len(rows)
    zero = RatFun.constant(variables, 0)
    one = RatFun.constant(variables, 1)
    A = [list(r) for r in rows]
    inv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if not A[r][c].is_zero()), None)
        if p is None:
            raise SingularMetricError("metric is singular (determinant is identically zero)")
        A[c], A[p] = A[p], A[c]
        inv[c], inv[p] = inv[p], inv[c]
        s = A[c][c].inverse()
        A[c] = [x * s for x in A[c]]
        inv[c] = [x * s for x in inv[c]]
        for r in range(n):
            if r != c and not A[r][c].is_zero():
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
                inv[r] = [a - f * b for a, b in zip(inv[r], inv[c])]
    return inv


def _sum(terms, zero):
    acc = zero
    for t in terms:
        if not t.is_zero():
            acc = acc + t
    return acc


class Curvature:
    """Lazily computed curvature hierarchy of one metric; each level is cached."""

    def __init__(self, g: Metric):
        self.g = g
        self.n = g.n
        self.vars = g.variables
        self.zero = RatFun.constant(self.vars, 0)

    def _require_conformal_dim(self):
        if self.n < 3:
            raise DimensionError(f"conformal curvature needs n >= 3, got n = {self.n}")

    @cached_property
    def inverse(self) -> list[list[RatFun]]:
        return _invert(self.g.components, self.vars)

    @cached_property
    def metric_derivatives(self) -> list[list[list[RatFun]]]:
        n, g, v = self.n, self.g, self.vars
        dg = [[[None] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                for k in range(n):
                    dg[i][j][k] = dg[j][i][k] = g[i, j].diff(v[k])
        return dg

    @cached_property
    def christoffel(self) -> list[list[list[RatFun]]]:
        """``christoffel[j][i][k]`` is Gamma^j_{ik}."""
        n, dg, gi = self.n, self.metric_derivatives, self.inverse
        gam = [[[None] * n for _ in range(n)] for _ in range(n)]
        half = RatFun.constant(self.vars, 1) / 2

        def one(ik):
            i, k = ik
            lowered = [dg[i][l][k] + dg[k][l][i] - dg[i][k][l] for l in range(n)]
            return [_sum((gi[j][l] * lowered[l] for l in range(n)), self.zero) * half for j in range(n)]

        pairs = [(i, k) for i in range(n) for k in range(i, n)]
        for (i, k), col in zip(pairs, pmap(one, pairs)):
            for j in range(n):
                gam[j][i][k] = gam[j][k][i] = col[j]
        return gam

    @cached_property
    def riemann(self) -> list[list[list[list[RatFun]]]]:
        """``riemann[l][i][j][k]`` is R^l_{ijk}."""
        n, G, v = self.n, self.christoffel, self.vars
        R = [[[[self.zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]

        def one(key):
            l, i, j, k = key
            val = G[l][k][i].diff(v[j]) - G[l][j][i].diff(v[k])
            quad = _sum((G[l][j][r] * G[r][k][i] - G[l][k][r] * G[r][j][i] for r in range(n)), self.zero)
            return val + quad

        keys = [(l, i, j, k) for l in range(n) for i in range(n) for j in range(n) for k in range(j + 1, n)]
        for (l, i, j, k), val in zip(keys, pmap(one, keys)):
            R[l][i][j][k] = val
            R[l][i][k][j] = -val
        return R

    @cached_property
    def ricci(self) -> list[list[RatFun]]:
        n, R = self.n, self.riemann
        ric = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                ric[i][j] = _sum((R[l][i][l][j] for l in range(n)), self.zero)
        return ric

    @cached_property
    def scalar(self) -> RatFun:
        n, gi, ric = self.n, self.inverse, self.ricci
        return _sum((gi[i][j] * ric[i][j] for i in range(n) for j in range(n)), self.zero)

    @cached_property
    def schouten(self) -> list[list[RatFun]]:
        self._require_conformal_dim()
        n, g, ric = self.n, self.g, self.ricci
        trace_part = self.scalar / (2 * (n - 1))
        S = [[None] * n for _ in range(n)]
        for i in range(n):
            for k in range(i, n):
                S[i][k] = S[k][i] = (ric[i][k] - trace_part * g[i, k]) / (n - 2)
        return S

    @cached_property
    def schouten_mixed(self) -> list[list[RatFun]]:
        """``schouten_mixed[j][l]`` is g^{jm} S_ml."""
        n, gi, S = self.n, self.inverse, self.schouten
        return [[_sum((gi[j][m] * S[m][l] for m in range(n)), self.zero) for l in range(n)] for j in range(n)]

    @cached_property
    def weyl(self) -> list[list[list[list[RatFun]]]]:
        """``weyl[j][i][k][l]`` is W^j_{ikl}."""
        self._require_conformal_dim()
        n, g, R, S, Sm = self.n, self.g, self.riemann, self.schouten, self.schouten_mixed
        W = [[[[self.zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for j in range(n):
            for i in range(n):
                for k in range(n):
                    for l in range(k + 1, n):
                        val = R[j][i][k][l] + g[i, k] * Sm[j][l] - g[i, l] * Sm[j][k]
                        if j == l:
                            val = val + S[i][k]
                        if j == k:
                            val = val - S[i][l]
                        W[j][i][k][l] = val
                        W[j][i][l][k] = -val
        return W

    @cached_property
    def schouten_derivative(self) -> list[list[list[RatFun]]]:
        """``schouten_derivative[i][j][k]`` is (nabla_i S)_jk."""
        n, v, S, G = self.n, self.vars, self.schouten, self.christoffel

        def one(i):
            block = [[None] * n for _ in range(n)]
            for j in range(n):
                for k in range(j, n):
                    val = S[j][k].diff(v[i])
                    val = val - _sum((G[p][i][j] * S[p][k] for p in range(n)), self.zero)
                    val = val - _sum((G[p][i][k] * S[j][p] for p in range(n)), self.zero)
                    block[j][k] = block[k][j] = val
            return block

        return pmap(one, list(range(n)))

    @cached_property
    def cotton(self) -> list[list[list[RatFun]]]:
        """``cotton[i][j][k]`` is C_ijk."""
        self._require_conformal_dim()
        n, D = self.n, self.schouten_derivative
        C = [[[self.zero] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    val = D[i][j][k] - D[j][i][k]
                    C[i][j][k] = val
                    C[j][i][k] = -val
        return C


@lru_cache(maxsize=32)
def curvature_of(g: Metric) -> Curvature:
    return Curvature(g)


def _nested(variance, variables, arr) -> TensorField:
    def get(*idx):
        x = arr
        for k in idx:
            x = x[k]
        return x

    return TensorField.from_function(variance, variables, get)


def inverse_metric(g: Metric) -> TensorField:
    return _nested("uu", g.variables, curvature_of(g).inverse)


def christoffel(g: Metric) -> TensorField:
    """Gamma^j_{ik} with index order (j, i, k)."""
    return _nested("ull", g.variables, curvature_of(g).christoffel)


def riemann(g: Metric) -> TensorField:
    return _nested("ulll", g.variables, curvature_of(g).riemann)


def ricci_scalar(g: Metric) -> tuple[TensorField, RatFun]:
    c = curvature_of(g)
    return _nested("ll", g.variables, c.ricci), c.scalar


def schouten(g: Metric) -> TensorField:
    return _nested("ll", g.variables, curvature_of(g).schouten)


def weyl(g: Metric) -> TensorField:
    """W^j_{ikl} with index order (j, i, k, l)."""
    return _nested("ulll", g.variables, curvature_of(g).weyl)


def cotton(g: Metric) -> TensorField:
    return _nested("lll", g.variables, curvature_of(g).cotton)


TENSORS = {
    "christoffel": christoffel,
    "riemann": riemann,
    "ricci": lambda g: ricci_scalar(g)[0],
    "schouten": schouten,
    "weyl": weyl,
    "cotton": cotton,
}


@dataclass(frozen=True)
class FlatnessVerdict:
    flat: bool
    tensor: str
    witness_index: tuple[int, ...] | None = None
    witness_value: RatFun | None = None

    def describe(self) -> str:
        if self.flat:
            return f"locally conformally flat ({self.tensor} vanishes)"
        return f"not flat: {self.tensor}{list(self.witness_index)} = {self.witness_value}"


def flatness_verdict(g: Metric) -> FlatnessVerdict:
    """Cotton tensor decides for n = 3, Weyl tensor for n >= 4."""
    if g.n < 3:
        raise DimensionError(f"conformal flatness is only defined here for n >= 3, got n = {g.n}")
    name = "cotton" if g.n == 3 else "weyl"
    t = TENSORS[name](g)
    for idx, val in t.nonzero():
        return FlatnessVerdict(False, name, idx, val)
    return FlatnessVerdict(True, name)
