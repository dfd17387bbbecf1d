"""Concrete metrics on K3 moduli: the six-line metric G, the map Psi, the
Kummer sublocus inclusion and the rescaled sublocus metric g', plus the flat
model metric of a quadric hypersurface.

Variables: ``x1..x4`` on the six-line parameter space, ``a, b, c, d`` on the
four-parameter family, and ``a, b, c`` on the Kummer sublocus.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import MultiPoly, RatFun, determinant, parse_expr, substitute
from .errors import DegeneratePullbackWarning, DimensionError, DomainError, SingularMetricError
from .tensors import Metric

X_VARS = ("x1", "x2", "x3", "x4")
ABCD = ("a", "b", "c", "d")
ABC = ("a", "b", "c")


@dataclass(frozen=True)
class DomainConstraints:
    """Polynomials that must not vanish at any admissible point."""

    variables: tuple[str, ...]
    inequations: tuple[MultiPoly, ...]

    @classmethod
    def parse(cls, variables: Iterable[str], polys: Iterable[str]) -> "DomainConstraints":
        variables = tuple(variables)
        return cls(variables, tuple(parse_expr(p, variables).num for p in polys))

    def violations(self, point: Mapping[str, object]) -> list[MultiPoly]:
        return [p for p in self.inequations if p(point) == 0]

    def check(self, point: Mapping[str, object]) -> None:
        bad = self.violations(point)
        if bad:
            raise DomainError(f"point {format_point(point)} lies on the excluded locus: " + ", ".join(f"{p} = 0" for p in bad))


def format_point(point: Mapping[str, object]) -> str:
    return "(" + ", ".join(f"{k}={Fraction(v)}" for k, v in point.items()) + ")"


@dataclass(frozen=True)
class RationalMap:
    """``target[k] = components[k](source)``."""

    source_variables: tuple[str, ...]
    target_variables: tuple[str, ...]
    components: tuple[RatFun, ...]

    def __post_init__(self):
        if len(self.components) != len(self.target_variables):
            raise DimensionError("one component per target variable is required")
        for c in self.components:
            if c.variables != self.source_variables:
                raise ValueError("map components must be functions of the source variables")

    @classmethod
    def from_strings(cls, source: Iterable[str], target: Iterable[str], exprs: Sequence[str]) -> "RationalMap":
        source = tuple(source)
        return cls(source, tuple(target), tuple(parse_expr(e, source) for e in exprs))

    def __call__(self, point: Mapping[str, object]) -> dict[str, Fraction]:
        return {t: c.evaluate(point) for t, c in zip(self.target_variables, self.components)}

    def bindings(self) -> dict[str, RatFun]:
        return dict(zip(self.target_variables, self.components))

    def jacobian(self) -> list[list[RatFun]]:
        """``jacobian()[k][i]`` is d(target_k)/d(source_i)."""
        return [[c.diff(v) for v in self.source_variables] for c in self.components]

    def jacobian_at(self, point: Mapping[str, object]) -> list[list[Fraction]]:
        return [[entry.evaluate(point) for entry in row] for row in self.jacobian()]

    def after(self, inner: "RationalMap") -> "RationalMap":
        """The composite ``self o inner``."""
        if inner.target_variables != self.source_variables:
            raise ValueError("maps are not composable")
        b = inner.bindings()
        comps = tuple(substitute(c, b, inner.source_variables) for c in self.components)
        return RationalMap(inner.source_variables, self.target_variables, comps)


def _denominators(rows) -> list[MultiPoly]:
    seen = []
    for row in rows:
        for x in row:
            if not x.is_polynomial() and x.den not in seen:
                seen.append(x.den)
    return seen


def _merge_excluded(*groups) -> tuple[MultiPoly, ...]:
    out: list[MultiPoly] = []
    for group in groups:
        for p in group:
            if not p.is_constant() and p not in out and -p not in out:
                out.append(p)
    return tuple(out)


# --- the six-line metric -------------------------------------------------------

_MSY = {
    (0, 1): "(x4-x3)/(x1-x2)",
    (0, 2): "(x4-x2)/(x1-x3)",
    (0, 3): "1",
    (1, 2): "1",
    (1, 3): "(x3-x1)/(x2-x4)",
    (2, 3): "(x2-x1)/(x3-x4)",
    (0, 0): "(x2*x3-x4)/(x1*(1-x1)) - x3*(x4-x2)/(x1*(x1-x3)) - x2*(x4-x3)/(x1*(x1-x2))",
    (1, 1): "(x1*x4-x3)/(x2*(1-x2)) - x1*(x3-x4)/(x2*(x2-x1)) - x4*(x3-x1)/(x2*(x2-x4))",
    (2, 2): "(x1*x4-x2)/(x3*(1-x3)) - x1*(x2-x4)/(x3*(x3-x1)) - x4*(x2-x1)/(x3*(x3-x4))",
    (3, 3): "(x2*x3-x1)/(x4*(1-x4)) - x3*(x1-x2)/(x4*(x4-x3)) - x2*(x1-x3)/(x4*(x4-x2))",
}

MSY_EXCLUDED = (
    "x1", "x2", "x3", "x4", "x1-1", "x2-1", "x3-1", "x4-1",
    "x1-x2", "x1-x3", "x2-x4", "x3-x4",
)


def msy_metric() -> Metric:
    """The integrable conformal metric G on the six-line parameter space."""
    rows = [[None] * 4 for _ in range(4)]
    for (i, j), text in _MSY.items():
        rows[i][j] = rows[j][i] = parse_expr(text, X_VARS)
    return Metric.from_rows(X_VARS, rows, MSY_EXCLUDED)


def matsumoto_invariant() -> RatFun:
    """Projective invariant whose zero set is the Kummer sublocus."""
    return parse_expr("-x1*x2*x3 + x1*x2*x4 + x1*x3*x4 - x2*x3*x4 - x1*x4 + x2*x3", X_VARS)


def psi_map() -> RationalMap:
    return RationalMap.from_strings(ABCD, X_VARS, ["a/b", "(a-c)/(b-c)", "1/b", "d/(b-c)"])


def kummer_inclusion() -> RationalMap:
    return RationalMap.from_strings(ABC, ABCD, ["a", "b", "c", "(b-c)*(a-c)/(a*b-c)"])


FOUR_PARAMETER_DOMAIN = DomainConstraints.parse(ABCD, ["a-b", "b", "b-c"])
KUMMER_DOMAIN = DomainConstraints.parse(ABC, ["a-b", "a-c", "b-c", "a*b-c", "a", "b", "c", "a-1", "b-1"])

#: 1/lambda in g' = lambda * iota^*(Psi^*G)
KUMMER_SCALE_INVERSE = "-2*b*c^2*(b-c)*(b-1)*(a-1)"


# --- transformations ----------------------------------------------------------------


def pullback_metric(G: Metric, phi: RationalMap, excluded: Iterable = (), check_degenerate: bool = True) -> Metric:
    """phi^*G with components G_kl(phi(t)) dphi^k/dt^i dphi^l/dt^j.

    A symbolically degenerate result is returned with a
    :class:`DegeneratePullbackWarning`, since restrictions legitimately lose rank.
    """
    if phi.target_variables != G.variables:
        raise ValueError(f"map lands in {phi.target_variables}, metric lives on {G.variables}")
    src = phi.source_variables
    n_src, n_tgt = len(src), G.n
    binds = phi.bindings()
    composed = [[None] * n_tgt for _ in range(n_tgt)]
    for k in range(n_tgt):
        for l in range(k, n_tgt):
            composed[k][l] = composed[l][k] = substitute(G[k, l], binds, src)
    J = phi.jacobian()
    zero = RatFun.constant(src, 0)
    # A[l][i] = sum_k G_kl(phi) J[k][i]
    A = [[sum((composed[k][l] * J[k][i] for k in range(n_tgt) if not J[k][i].is_zero()), zero)
          for i in range(n_src)] for l in range(n_tgt)]
    rows = [[None] * n_src for _ in range(n_src)]
    for i in range(n_src):
        for j in range(i, n_src):
            rows[i][j] = rows[j][i] = sum((A[l][i] * J[l][j] for l in range(n_tgt) if not J[l][j].is_zero()), zero)
    extra = [parse_expr(p, src).num if isinstance(p, str) else p for p in excluded]
    result = Metric(src, tuple(tuple(r) for r in rows), _merge_excluded(extra, _denominators(rows)))
    if check_degenerate and result.determinant().is_zero():
        warnings.warn("pullback metric is degenerate (determinant vanishes identically)", DegeneratePullbackWarning, stacklevel=2)
    return result


def conformal_rescale(g: Metric, factor: RatFun) -> Metric:
    if factor.is_zero():
        raise ValueError("conformal factor must not vanish identically")
    if factor.variables != g.variables:
        factor = substitute(factor, {}, g.variables)
    return g.scaled(factor)


def conformally_equivalent(g1: Metric, g2: Metric) -> RatFun | None:
    """Return lambda with g1 = lambda * g2, or None if no such factor exists."""
    if g1.variables != g2.variables:
        raise ValueError("metrics live on different coordinates")
    n = g1.n
    factor = None
    for i in range(n):
        for j in range(i, n):
            a, b = g1[i, j], g2[i, j]
            if a.is_zero() != b.is_zero():
                return None
            if factor is None and not a.is_zero():
                factor = a / b
    if factor is None:
        return None
    for i in range(n):
        for j in range(i, n):
            if g1[i, j] != factor * g2[i, j]:
                return None
    return factor


def kummer_pullback() -> Metric:
    """iota^*(Psi^*G) computed as a single pullback along Psi o iota."""
    return pullback_metric(msy_metric(), psi_map().after(kummer_inclusion()), KUMMER_DOMAIN.inequations)


def kummer_scale() -> RatFun:
    return RatFun.constant(ABC, 1) / parse_expr(KUMMER_SCALE_INVERSE, ABC)


def reference_kummer_metric() -> Metric:
    """The rescaled conformal metric g' on the Kummer sublocus, as tabulated."""
    rows = [
        ["1", "0", "-a/(2*c)"],
        ["0", "-a*(a-c)*(a-1)/(b*(b-c)*(b-1))", "a*(a-c)*(a-1)/(2*c*(b-c)*(b-1))"],
        ["-a/(2*c)", "a*(a-c)*(a-1)/(2*c*(b-c)*(b-1))", "0"],
    ]
    return Metric.from_rows(ABC, rows, KUMMER_DOMAIN.inequations)


def quadric_model_metric(h: Sequence[Sequence]) -> Metric:
    """Flat conformal metric of the quadric -2 X0 X_{n+1} + h(X, X) = 0.

    Pulls the ambient form -2 dX0 dX_{n+1} + h_ij dX^i dX^j back along the
    affine section t -> (1, t, h(t, t)/2).
    """
    n = len(h)
    if n < 3:
        raise DimensionError(f"quadric model needs n >= 3, got n = {n}")
    h = [[Fraction(x) for x in row] for row in h]
    if any(len(row) != n for row in h) or any(h[i][j] != h[j][i] for i in range(n) for j in range(n)):
        raise ValueError("h must be a symmetric square matrix")
    if determinant(h) == 0:
        raise SingularMetricError("h is degenerate")
    t = tuple(f"t{i + 1}" for i in range(n))
    X = tuple(f"X{i}" for i in range(n + 2))
    ambient = [[Fraction(0)] * (n + 2) for _ in range(n + 2)]
    ambient[0][n + 1] = ambient[n + 1][0] = Fraction(-1)
    for i in range(n):
        for j in range(n):
            ambient[i + 1][j + 1] = h[i][j]
    ambient_metric = Metric.from_rows(X, ambient)
    gens = [RatFun.gen(t, v) for v in t]
    quad = sum((gens[i] * gens[j] * h[i][j] for i in range(n) for j in range(n)), RatFun.constant(t, 0)) / 2
    section = RationalMap(t, X, (RatFun.constant(t, 1), *gens, quad))
    return pullback_metric(ambient_metric, section, check_degenerate=False)
