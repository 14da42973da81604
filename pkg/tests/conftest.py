from fractions import Fraction

import mpmath
import pytest
from hypothesis import settings, strategies as st

from qzeta.exact_algebra import IntPoly, RatFunc

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")



@pytest.fixture(autouse=True)
def oracle_precision():
    """mpmath oracles run at 400 bits regardless of test order."""
    with mpmath.workprec(400):
        yield


small_ints = st.integers(min_value=-20, max_value=20)
coeff_lists = st.lists(small_ints, min_size=0, max_size=7)


@st.composite
def int_polys(draw, nonzero=False):
    cs = draw(coeff_lists)
    p = IntPoly(cs)
    if nonzero and not p:
        p = IntPoly([draw(st.integers(min_value=1, max_value=9))])
    return p


@st.composite
def ratfuncs(draw):
    num = draw(int_polys())
    den = draw(int_polys(nonzero=True))
    return RatFunc(num, den, draw(st.fractions(min_value=-5, max_value=5, max_denominator=7)))


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=50)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    lines = mod.summary_lines() if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
