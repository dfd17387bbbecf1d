"""Second-order holonomic systems attached to integrable conformal metrics.

For a metric g with Christoffel symbols Gamma and Ricci tensor Ric put

    T_kl(w) = w_kl - Gamma^p_kl w_p + Ric_kl w / (n - 2).

The system says that T_kl is proportional to g_kl, i.e. every pair of
symmetric index pairs P, Q gives an operator g_P T_Q - g_Q T_P.

An operator acts on w as ``sum_ab d2[a][b] w_ab + sum_p d1[p] w_p + d0 w``;
``d2`` is symmetric, so an off-diagonal derivative w_kl contributes 1/2 to
both d2[k][l] and d2[l][k] before denominators are cleared.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import MultiPoly, RatFun, parse_expr
from .algebra.ratfun import clear_denominators
from .errors import DimensionError, NotIntegrableError
from .tensors import Metric, curvature_of, flatness_verdict

Pair = tuple[int, int]


@dataclass(frozen=True, eq=False)
class PDEOperator:
    second_order: tuple[tuple[RatFun, ...], ...]
    first_order: tuple[RatFun, ...]
    zeroth_order: RatFun
    pairs: tuple[Pair, Pair] | None = None

    def __post_init__(self):
        n = len(self.first_order)
        if len(self.second_order) != n or any(len(r) != n for r in self.second_order):
            raise DimensionError("second-order coefficients must form an n x n matrix")
        for i, j in itertools.combinations(range(n), 2):
            if self.second_order[i][j] != self.second_order[j][i]:
                raise ValueError("second-order coefficient matrix must be symmetric")

    @property
    def n(self) -> int:
        return len(self.first_order)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.zeroth_order.variables

    def coefficients(self) -> list[RatFun]:
        """Row-major d2, then d1, then d0."""
        return [x for row in self.second_order for x in row] + list(self.first_order) + [self.zeroth_order]

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[RatFun], n: int, pairs=None) -> "PDEOperator":
        d2 = tuple(tuple(coeffs[i * n:(i + 1) * n]) for i in range(n))
        d1 = tuple(coeffs[n * n:n * n + n])
        return cls(d2, d1, coeffs[-1], pairs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients())

    def normalized(self) -> "PDEOperator":
        """Clear denominators and remove polynomial content."""
        return PDEOperator.from_coefficients(clear_denominators(self.coefficients()), self.n, self.pairs)

    def apply(self, w: RatFun) -> RatFun:
        v = self.variables
        n = self.n
        grads = [w.diff(x) for x in v]
        out = self.zeroth_order * w
        for p in range(n):
            if not self.first_order[p].is_zero():
                out = out + self.first_order[p] * grads[p]
        for a in range(n):
            for b in range(n):
                if not self.second_order[a][b].is_zero():
                    out = out + self.second_order[a][b] * grads[a].diff(v[b])
        return out

    def __eq__(self, other):
        if not isinstance(other, PDEOperator):
            return NotImplemented
        return self.coefficients() == other.coefficients()

    def __hash__(self):
        return hash(tuple(self.coefficients()))

    def to_dict(self) -> dict:
        out = {
            "d2": [[str(x) for x in row] for row in self.second_order],
            "d1": [str(x) for x in self.first_order],
            "d0": str(self.zeroth_order),
        }
        if self.pairs is not None:
            out["pairs"] = [list(p) for p in self.pairs]
        return out

    @classmethod
    def from_dict(cls, data: dict, variables: tuple[str, ...]) -> "PDEOperator":
        d2 = tuple(tuple(parse_expr(s, variables) for s in row) for row in data["d2"])
        d1 = tuple(parse_expr(s, variables) for s in data["d1"])
        d0 = parse_expr(data["d0"], variables)
        pairs = tuple(tuple(p) for p in data["pairs"]) if "pairs" in data else None
        return cls(d2, d1, d0, pairs)


@dataclass(frozen=True, eq=False)
class HolonomicSystem:
    variables: tuple[str, ...]
    operators: tuple[PDEOperator, ...]
    declared_rank: int
    excluded: tuple[MultiPoly, ...] = ()
    source: Metric | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.operators:
            raise ValueError("a holonomic system needs at least one operator")
        for op in self.operators:
            if op.n != len(self.variables):
                raise DimensionError("operator size does not match the number of variables")
        if self.declared_rank != len(self.variables) + 2:
            raise ValueError("declared rank must be n + 2")

    @property
    def n(self) -> int:
        return len(self.variables)

    def without(self, index: int) -> "HolonomicSystem":
        """Copy of the system with one operator removed."""
        ops = self.operators[:index] + self.operators[index + 1:]
        return HolonomicSystem(self.variables, ops, self.declared_rank, self.excluded, self.source)

    def __eq__(self, other):
        if not isinstance(other, HolonomicSystem):
            return NotImplemented
        return (self.variables, self.operators, self.declared_rank, self.excluded) == (
            other.variables, other.operators, other.declared_rank, other.excluded)

    def __hash__(self):
        return hash((self.variables, self.operators))


def symmetric_pairs(n: int) -> list[Pair]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def _t_operator(g: Metric, pair: Pair) -> tuple[list[list[RatFun]], list[RatFun], RatFun]:
    curv = curvature_of(g)
    n, v = g.n, g.variables
    zero = RatFun.constant(v, 0)
    k, l = pair
    d2 = [[zero] * n for _ in range(n)]
    if k == l:
        d2[k][k] = RatFun.constant(v, 1)
    else:
        d2[k][l] = d2[l][k] = RatFun.constant(v, 1) / 2
    d1 = [-curv.christoffel[p][k][l] for p in range(n)]
    d0 = curv.ricci[k][l] / (n - 2)
    return d2, d1, d0


def _pair_operator(g: Metric, P: Pair, Q: Pair) -> PDEOperator:
    """g_P T_Q - g_Q T_P, normalized."""
    gP, gQ = g[P], g[Q]
    a2, a1, a0 = _t_operator(g, Q)
    b2, b1, b0 = _t_operator(g, P)
    n = g.n
    d2 = tuple(tuple(gP * a2[i][j] - gQ * b2[i][j] for j in range(n)) for i in range(n))
    d1 = tuple(gP * a1[p] - gQ * b1[p] for p in range(n))
    d0 = gP * a0 - gQ * b0
    return PDEOperator(d2, d1, d0, (P, Q)).normalized()


def _require_integrable(g: Metric) -> None:
    if g.n < 3:
        raise DimensionError(f"the conformal system needs n >= 3, got n = {g.n}")
    verdict = flatness_verdict(g)
    if not verdict.flat:
        raise NotIntegrableError(verdict)


def generate_pf_system(g: Metric, check_integrable: bool = True) -> HolonomicSystem:
    """All pairwise operators g_P T_Q - g_Q T_P (P before Q), zero operators dropped."""
    if check_integrable:
        _require_integrable(g)
    elif g.n < 3:
        raise DimensionError(f"the conformal system needs n >= 3, got n = {g.n}")
    ops = []
    for P, Q in itertools.combinations(symmetric_pairs(g.n), 2):
        op = _pair_operator(g, P, Q)
        if not op.is_zero():
            ops.append(op)
    return HolonomicSystem(g.variables, tuple(ops), g.n + 2, g.excluded, g)


def pivot_pair(g: Metric) -> Pair:
    """First nonzero diagonal entry, else the first nonzero off-diagonal one."""
    n = g.n
    for i in range(n):
        if not g[i, i].is_zero():
            return (i, i)
    for P in symmetric_pairs(n):
        if not g[P].is_zero():
            return P
    raise ValueError("metric is identically zero")


def reduce_system(system: HolonomicSystem) -> HolonomicSystem:
    """Keep only the operators relating each symmetric pair to a pivot pair."""
    g = system.source
    if g is None:
        raise ValueError("reduction needs the source metric of the system")
    P = pivot_pair(g)
    ops = tuple(_pair_operator(g, P, Q) for Q in symmetric_pairs(g.n) if Q != P)
    return HolonomicSystem(system.variables, ops, system.declared_rank, system.excluded, g)


def serialize_system(system: HolonomicSystem) -> str:
    doc = {
        "variables": list(system.variables),
        "declared_rank": system.declared_rank,
        "exclude": [str(p) for p in system.excluded],
        "operators": [op.to_dict() for op in system.operators],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_system(text: str) -> HolonomicSystem:
    data = json.loads(text)
    variables = tuple(data["variables"])
    ops = tuple(PDEOperator.from_dict(o, variables) for o in data["operators"])
    excluded = tuple(parse_expr(s, variables).num for s in data.get("exclude", []))
    rank = data.get("declared_rank", len(variables) + 2)
    return HolonomicSystem(variables, ops, rank, excluded)
