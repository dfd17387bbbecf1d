from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hcs_forge.algebra import MultiPoly, RatFun

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ABC = ("a", "b", "c")

coeffs = st.fractions(min_value=-6, max_value=6, max_denominator=4)
monos = st.tuples(*(st.integers(0, 2) for _ in ABC))


@st.composite
def polys(draw, variables=ABC, max_terms=4):
    terms = draw(st.dictionaries(monos, coeffs, max_size=max_terms))
    return MultiPoly(variables, terms)


@st.composite
def nonzero_polys(draw, variables=ABC):
    p = draw(polys(variables))
    if p.is_zero():
        p = MultiPoly.constant(variables, draw(coeffs.filter(bool)))
    return p


@st.composite
def ratfuns(draw, variables=ABC):
    return RatFun(draw(polys(variables)), draw(nonzero_polys(variables)))


@st.composite
def points(draw, variables=ABC):
    vals = st.fractions(min_value=-9, max_value=9, max_denominator=5)
    return {v: draw(vals) for v in variables}


def gen(name, variables=ABC):
    return RatFun.gen(variables, name)


@pytest.fixture
def abc():
    return tuple(gen(v) for v in ABC)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
