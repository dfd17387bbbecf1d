"""Exact arithmetic substrate: polynomials, rational functions, parsing, linear algebra."""
from .linalg import LinearSolution, determinant, matrix_rank, nullspace, solve_linear_exact
from .parsing import parse_expr
from .poly import MultiPoly
from .ratfun import RatFun, differentiate, evaluate, normalize, raw_quotient, substitute

__all__ = [
    "LinearSolution",
    "MultiPoly",
    "RatFun",
    "determinant",
    "differentiate",
    "evaluate",
    "matrix_rank",
    "normalize",
    "nullspace",
    "parse_expr",
    "raw_quotient",
    "solve_linear_exact",
    "substitute",
]
