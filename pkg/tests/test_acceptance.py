"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.  All checks are exact.
"""
import itertools
import random
import sys
import time
from fractions import Fraction

import pytest

from hcs_forge.algebra import MultiPoly, RatFun, differentiate, substitute
from hcs_forge.holonomic import generate_pf_system, reduce_system
from hcs_forge.k3 import (ABC, FOUR_PARAMETER_DOMAIN, conformal_rescale, kummer_inclusion,
                          kummer_pullback, kummer_scale, matsumoto_invariant, msy_metric, psi_map,
                          pullback_metric, quadric_model_metric, reference_kummer_metric)
from hcs_forge.series import (explicit_basis, quadric_relations, recover_quadric, solution_basis,
                              solution_rank)
from hcs_forge.tensors import Metric, cotton, ricci_scalar, riemann, weyl

PT = {"a": 2, "b": 3, "c": 5}
RESULTS: list[str] = []


def _random_ratfun(rng, variables, terms=3):
    def poly():
        return MultiPoly(variables, {tuple(rng.randint(0, 2) for _ in variables): Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                                     for _ in range(terms)})
    den = poly()
    while den.is_zero():
        den = poly()
    return RatFun(poly(), den)


def _random_scale(rng, variables):
    lam = _random_ratfun(rng, variables, 2)
    while lam.is_zero():
        lam = _random_ratfun(rng, variables, 2)
    return lam


# --- criteria ----------------------------------------------------------------------------

def c1_weyl_msy():
    return weyl(msy_metric()).is_zero(), "W(G) has no nonzero component"


def c2_weyl_psi_pullback():
    g = pullback_metric(msy_metric(), psi_map(), FOUR_PARAMETER_DOMAIN.inequations)
    return weyl(g).is_zero(), "W(Psi^*G) over (a,b,c,d) has no nonzero component"


def c3_pipeline_identity():
    rescaled = conformal_rescale(kummer_pullback(), kummer_scale())
    ref = reference_kummer_metric()
    bad = [(i, j) for i in range(3) for j in range(i, 3) if rescaled[i, j] != ref[i, j]]
    if not bad:
        return True, "all six components identical"
    i, j = bad[0]
    return False, (f"{len(bad)} of 6 components differ; ({ABC[i]},{ABC[j]}): got {rescaled[i, j]}, "
                   f"table {ref[i, j]}; ratio {rescaled[i, j] / ref[i, j]}")


def c4_cotton_gprime():
    return cotton(reference_kummer_metric()).is_zero(), "C(g') has no nonzero component"


def c5_invariant_on_kummer_image():
    r = substitute(matsumoto_invariant(), psi_map().after(kummer_inclusion()).bindings(), ABC)
    return r.is_zero(), f"R o Psi on the sublocus normalizes to {r}"


def _kummer_system():
    return reduce_system(generate_pf_system(reference_kummer_metric()))


def c6_rank():
    s = _kummer_system()
    r5, r6 = solution_rank(s, PT, 5), solution_rank(s, PT, 6)
    return r5 == r6 == 5, f"rank {r5} at D=5, {r6} at D=6"


def c7_quadric():
    forms = quadric_relations(solution_basis(_kummer_system(), PT, 6))
    ok = len(forms) == 1 and forms[0].is_nondegenerate()
    det = forms[0].determinant() if forms else None
    return ok, f"{len(forms)}-dimensional relation space, det B = {det}"


def c8_flat_model():
    h = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    g = quadric_model_metric(h)
    v = g.variables
    t = [RatFun.gen(v, x) for x in v]
    q = sum((x * x for x in t), RatFun.constant(v, 0)) / 2
    sols = [RatFun.constant(v, 1), *t, q]
    full = generate_pf_system(g)
    annihilated = all(op.apply(w).is_zero() for op in full.operators for w in sols)
    origin = {x: 0 for x in v}
    rank = solution_rank(reduce_system(full), origin, 4)
    B = recover_quadric(explicit_basis(sols, origin, 4))
    model = [[0, 0, 0, 0, -1], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [-1, 0, 0, 0, 0]]
    ok = annihilated and rank == 5 and B.proportional_to(model)
    return ok, f"annihilated={annihilated}, rank {rank}, B proportional to -2X0X4 + sum Xi^2: {B.proportional_to(model)}"


def c9_sphere():
    T = ("t1", "t2", "t3")
    q = "(1 + t1^2 + t2^2 + t3^2)^2"
    g = Metric.from_rows(T, [[f"4/{q}" if i == j else 0 for j in range(3)] for i in range(3)])
    ric, scal = ricci_scalar(g)
    einstein = all(ric[i, j] == 2 * g[i, j] for i in range(3) for j in range(3))
    ok = einstein and scal == RatFun.constant(T, 6) and cotton(g).is_zero()
    return ok, f"R_ij = 2 g_ij: {einstein}, R = {scal}, Cotton zero: {cotton(g).is_zero()}"


def c10_properties():
    rng = random.Random(20240611)
    failures = []
    for _ in range(25):
        f, g, h = (_random_ratfun(rng, ABC) for _ in range(3))
        if (f + g) + h != f + (g + h) or f * (g + h) != f * g + f * h:
            failures.append("ring laws")
        v = rng.choice(ABC)
        if differentiate(f * g, v) != differentiate(f, v) * g + f * differentiate(g, v):
            failures.append("Leibniz")
    for metric in (reference_kummer_metric(), msy_metric()):
        R = riemann(metric)
        n = metric.n
        for l, i, j, k in itertools.product(range(n), repeat=4):
            if not (R[l, i, j, k] + R[l, j, k, i] + R[l, k, i, j]).is_zero():
                failures.append("Bianchi")
                break
    gp = reference_kummer_metric()
    base_c = cotton(gp)
    for _ in range(3):
        if cotton(gp.scaled(_random_scale(rng, ABC))) != base_c:
            failures.append("Cotton conformal invariance")
    G = msy_metric()
    base_w = weyl(G)
    for _ in range(2):
        if weyl(G.scaled(_random_scale(rng, G.variables))) != base_w:
            failures.append("Weyl conformal invariance")
    two = pullback_metric(pullback_metric(G, psi_map()), kummer_inclusion(), check_degenerate=False)
    one = pullback_metric(G, psi_map().after(kummer_inclusion()), check_degenerate=False)
    if two != one:
        failures.append("pullback functoriality")
    return not failures, "all property suites hold" if not failures else "failed: " + ", ".join(sorted(set(failures)))


CRITERIA = [
    (1, "Weyl vanishing for G", c1_weyl_msy),
    (2, "Weyl vanishing for Psi^*G", c2_weyl_psi_pullback),
    (3, "pipeline identity with the stated rescaling factor", c3_pipeline_identity),
    (4, "Cotton vanishing for g'", c4_cotton_gprime),
    (5, "invariant R vanishes on the Kummer image", c5_invariant_on_kummer_image),
    (6, "rank certificate at (2,3,5)", c6_rank),
    (7, "quadric certificate at (2,3,5), D=6", c7_quadric),
    (8, "flat-model oracle", c8_flat_model),
    (9, "constant-curvature oracle", c9_sphere),
    (10, "property suites", c10_properties),
]

# criterion 3 does not hold as stated; analysis in the decisions ledger
KNOWN_RED = {3: "computed factor is -2c^2(a-1)(b-1)/(ab(b-c)(ab-c)^2), not 1/(-2bc^2(b-c)(b-1)(a-1))"}


def run_criterion(number, title, fn) -> tuple[bool, str]:
    t0 = time.perf_counter()
    ok, detail = fn()
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} [{time.perf_counter() - t0:6.2f}s] {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok, detail


def _param(number, title, fn):
    marks = [pytest.mark.xfail(strict=True, reason=KNOWN_RED[number])] if number in KNOWN_RED else []
    return pytest.param(number, title, fn, id=f"criterion{number}", marks=marks)


@pytest.mark.parametrize("number, title, fn", [_param(*c) for c in CRITERIA])
def test_criterion(number, title, fn):
    ok, detail = run_criterion(number, title, fn)
    assert ok, detail


if __name__ == "__main__":
    results = [run_criterion(*c)[0] for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
