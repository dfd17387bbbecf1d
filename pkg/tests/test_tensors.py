import itertools
import json
import random
from fractions import Fraction

import pytest
import sympy as sp

from hcs_forge.algebra import RatFun, parse_expr
from hcs_forge.errors import DimensionError, SingularMetricError
from hcs_forge.k3 import msy_metric, reference_kummer_metric
from hcs_forge.tensors import (Metric, TensorField, christoffel, cotton, flatness_verdict,
                               inverse_metric, ricci_scalar, riemann, schouten, weyl)

from sym_oracle import curvature as sym_curvature, to_sympy

T3 = ("t1", "t2", "t3")
R3 = range(3)


def sphere():
    q = "(1 + t1^2 + t2^2 + t3^2)^2"
    return Metric.from_rows(T3, [[f"4/{q}" if i == j else "0" for j in R3] for i in R3])


def cylinder():
    return Metric.from_rows(T3, [[1, 0, 0], [0, 1, 0], [0, 0, "t1^2"]])


def perturbed():
    return Metric.from_rows(T3, [[1, 0, 0], [0, 1, 0], [0, 0, "1 + t1"]])


def lumpy4():
    """A non-flat four-dimensional metric."""
    T4 = ("t1", "t2", "t3", "t4")
    return Metric.from_rows(T4, [[1, 0, "t2", 0], [0, "1 + t1^2", 0, 0], ["t2", 0, 2, 0], [0, 0, 0, "t3"]])


def test_inverse_diagonal():
    ginv = inverse_metric(cylinder())
    expect = [[1, 0, 0], [0, 1, 0], [0, 0, parse_expr("1/t1^2", T3)]]
    for i, j in itertools.product(R3, R3):
        assert ginv[i, j] == RatFun.constant(T3, expect[i][j]) if not isinstance(expect[i][j], RatFun) else ginv[i, j] == expect[i][j]


def test_inverse_of_gprime_is_exact():
    g = reference_kummer_metric()
    ginv = inverse_metric(g)
    for i, k in itertools.product(R3, R3):
        s = sum((g[i, j] * ginv[j, k] for j in R3), RatFun.constant(g.variables, 0))
        assert s == RatFun.constant(g.variables, int(i == k))


def test_singular_metric_rejected():
    g = Metric.from_rows(T3, [["t1", "t2", 0], ["t2", "t2^2/t1", 0], [0, 0, 1]])
    with pytest.raises(SingularMetricError):
        inverse_metric(g)


def test_constant_metric_has_no_connection_or_curvature():
    g = Metric.from_rows(T3, [[2, 1, 0], [1, 3, 0], [0, 0, -1]])
    assert christoffel(g).is_zero() and riemann(g).is_zero()


def test_cylinder_christoffel_and_flatness():
    G = christoffel(cylinder())
    one_over = parse_expr("1/t1", T3)
    expected = {(2, 0, 2): one_over, (2, 2, 0): one_over, (0, 2, 2): parse_expr("-t1", T3)}
    for idx in G.indices():
        assert G[idx] == expected.get(idx, RatFun.constant(T3, 0))
    assert riemann(cylinder()).is_zero()


def test_sphere_christoffel():
    assert christoffel(sphere())[0, 0, 0] == parse_expr("-2*t1/(1 + t1^2 + t2^2 + t3^2)", T3)


def test_sphere_constant_curvature():
    g = sphere()
    R = riemann(g)
    for l, i, j, k in itertools.product(R3, repeat=4):
        assert R[l, i, j, k] == int(l == j) * g[i, k] - int(l == k) * g[i, j]
    ric, scal = ricci_scalar(g)
    for i, j in itertools.product(R3, R3):
        assert ric[i, j] == 2 * g[i, j]
        assert schouten(g)[i, j] == g[i, j] / 2
    assert scal == RatFun.constant(T3, 6)
    assert cotton(g).is_zero()


@pytest.mark.parametrize("make", [sphere, perturbed, reference_kummer_metric, lumpy4])
def test_index_symmetries_and_bianchi(make):
    g = make()
    n = g.n
    G, R = christoffel(g), riemann(g)
    rng = range(n)
    for i, j, k in itertools.product(rng, repeat=3):
        assert G[i, j, k] == G[i, k, j]
    for l, i, j, k in itertools.product(rng, repeat=4):
        assert R[l, i, j, k] == -R[l, i, k, j]
        assert (R[l, i, j, k] + R[l, j, k, i] + R[l, k, i, j]).is_zero()
    ric, _ = ricci_scalar(g)
    S = schouten(g)
    for i, j in itertools.product(rng, rng):
        assert ric[i, j] == ric[j, i] and S[i, j] == S[j, i]
    if n == 3:
        C = cotton(g)
        for i, j, k in itertools.product(rng, repeat=3):
            assert C[i, j, k] == -C[j, i, k]


def test_weyl_trace_free_in_four_dimensions():
    g = lumpy4()
    W = weyl(g)
    assert not W.is_zero()
    zero = RatFun.constant(g.variables, 0)
    rng = range(4)
    for i, l in itertools.product(rng, rng):
        assert sum((W[j, i, j, l] for j in rng), zero).is_zero()
        assert sum((W[j, i, l, j] for j in rng), zero).is_zero()


def test_weyl_vanishes_in_three_dimensions():
    assert weyl(reference_kummer_metric()).is_zero()
    assert weyl(perturbed()).is_zero()


def test_msy_metric_is_flat():
    v = flatness_verdict(msy_metric())
    assert v.flat and v.tensor == "weyl"


def test_gprime_cotton_vanishes():
    v = flatness_verdict(reference_kummer_metric())
    assert v.flat and v.tensor == "cotton"


def _random_scale(rng, variables):
    a, b, c = variables
    terms = [f"{rng.randint(1, 5)}*{rng.choice(variables)}^{rng.randint(1, 2)}" for _ in range(2)]
    den = f"({rng.randint(1, 4)} + {rng.choice(variables)})"
    return parse_expr(f"({' + '.join(terms)} - {rng.randint(1, 7)})/{den}", variables)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_cotton_conformal_invariance(seed):
    g = reference_kummer_metric()
    lam = _random_scale(random.Random(seed), g.variables)
    assert cotton(g.scaled(lam)) == cotton(g)


def test_cotton_of_nonflat_metric_is_not_conformally_invariant_for_free():
    # sanity: the same scaling does change Ricci, so the check above is not vacuous
    g = reference_kummer_metric()
    lam = _random_scale(random.Random(1), g.variables)
    assert ricci_scalar(g.scaled(lam))[0] != ricci_scalar(g)[0]


@pytest.mark.parametrize("seed", [11, 12])
def test_weyl_conformal_invariance_on_msy(seed):
    G = msy_metric()
    lam = _random_scale(random.Random(seed), G.variables[:3])
    lam = parse_expr(str(lam), G.variables)
    assert weyl(G.scaled(lam)) == weyl(G)


def test_weyl_conformal_invariance_nonflat():
    g = lumpy4()
    lam = parse_expr("(1 + t1*t4)/(2 - t3)", g.variables)
    assert weyl(g.scaled(lam)) == weyl(g)


def test_perturbed_metric_not_flat_with_sympy_witness():
    g = perturbed()
    v = flatness_verdict(g)
    assert not v.flat and v.tensor == "cotton"
    syms = sp.symbols(T3)
    rows = [[to_sympy(g[i, j], syms) for j in R3] for i in R3]
    oracle = sym_curvature(rows, syms)["cotton"]
    assert sp.simplify(oracle[v.witness_index] - to_sympy(v.witness_value, syms)) == 0
    C = cotton(g)
    for idx in C.indices():
        assert sp.simplify(oracle[idx] - to_sympy(C[idx], syms)) == 0


def test_curvature_chain_matches_sympy_on_gprime():
    g = reference_kummer_metric()
    syms = sp.symbols(g.variables)
    rows = [[to_sympy(g[i, j], syms) for j in R3] for i in R3]
    oracle = sym_curvature(rows, syms, upto="ricci")
    G = christoffel(g)
    for k, i, j in itertools.product(R3, repeat=3):
        assert sp.cancel(oracle["christoffel"][k][i][j] - to_sympy(G[k, i, j], syms)) == 0
    ric, scal = ricci_scalar(g)
    for pt in [(2, 3, 5), (Fraction(-1, 2), 7, Fraction(4, 3))]:
        subs = dict(zip(syms, map(sp.Rational, pt)))
        named = dict(zip(g.variables, pt))
        for i, j in itertools.product(R3, R3):
            assert oracle["ricci"][i, j].subs(subs) == sp.Rational(str(ric[i, j].evaluate(named)))
        assert oracle["scalar"].subs(subs) == sp.Rational(str(scal.evaluate(named)))


def test_low_dimension_rejected():
    g2 = Metric.from_rows(("u", "v"), [[1, 0], [0, "u^2"]])
    assert riemann(g2).is_zero()
    with pytest.raises(DimensionError):
        flatness_verdict(g2)
    with pytest.raises(DimensionError):
        schouten(g2)


def test_tensor_json_round_trip():
    t = christoffel(sphere())
    doc = json.loads(t.to_json())
    assert doc["variance"] == ["upper", "lower", "lower"]
    assert doc["variables"] == list(T3) and len(doc["components"]) == 27
    assert TensorField.from_dict(doc) == t


def test_parallel_matches_sequential(monkeypatch):
    monkeypatch.setenv("HCS_FORGE_THREADS", "0")
    seq = cotton(perturbed().scaled(parse_expr("t2 + 3", T3)))
    monkeypatch.setenv("HCS_FORGE_THREADS", "4")
    par = cotton(perturbed().scaled(parse_expr("t2 + 3", T3)))
    assert seq == par and seq.to_json() == par.to_json()


def test_asymmetric_metric_rejected():
    with pytest.raises(ValueError):
        Metric.from_rows(T3, [[1, "t1", 0], [0, 1, 0], [0, 0, 1]])
