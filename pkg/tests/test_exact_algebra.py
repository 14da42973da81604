import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from qzeta import _pykernels
from qzeta.exact_algebra import IntPoly, Jet, LaurentPoly, RatFunc, jet_of_linear_factor, laurent_membership, poly_gcd

from tests.conftest import coeff_lists, int_polys, rationals, ratfuncs

Q = sympy.Symbol("q")


def to_sympy(p: IntPoly):
    return sum(c * Q**i for i, c in enumerate(p.coeffs))


def ratfunc_to_sympy(f: RatFunc):
    return sympy.Rational(f.scale.numerator, f.scale.denominator) * to_sympy(f.num) / to_sympy(f.den)


@given(int_polys(), int_polys(), int_polys())
def test_intpoly_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == IntPoly()


@given(int_polys(), int_polys(nonzero=True))
def test_exact_division_roundtrip(a, b):
    assert (a * b).exact_quotient(b) == a


@given(int_polys(nonzero=True), int_polys(nonzero=True), int_polys(nonzero=True))
def test_primitive_gcd_matches_sympy(a, b, c):
    g = poly_gcd(a * c, b * c)
    expected = sympy.Poly(sympy.gcd(to_sympy(a * c), to_sympy(b * c)), Q)
    exp_coeffs = [int(x) for x in reversed(expected.all_coeffs())]
    content = math.gcd(*exp_coeffs)
    exp_coeffs = [x // content for x in exp_coeffs]
    if exp_coeffs[-1] < 0:
        exp_coeffs = [-x for x in exp_coeffs]
    assert list(g.coeffs) == exp_coeffs


@given(ratfuncs(), ratfuncs(), ratfuncs())
def test_ratfunc_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a - b) + b == a
    if b:
        assert (a / b) * b == a
    assert a.subs_inverse().subs_inverse() == a


@given(ratfuncs())
def test_canonical_form_is_structural(f):
    g = RatFunc(f.num * IntPoly([3, -1, 2]), f.den * IntPoly([3, -1, 2]), f.scale)
    assert f == g and hash(f) == hash(g)
    if f:
        assert f.den.lc > 0 and f.num.lc > 0


@given(ratfuncs(), rationals)
def test_ratfunc_evaluation_matches_sympy(f, x):
    try:
        v = f(x)
    except ZeroDivisionError:
        assume(False)
    assert sympy.Rational(v.numerator, v.denominator) == ratfunc_to_sympy(f).subs(Q, sympy.Rational(x.numerator, x.denominator))


@given(ratfuncs())
def test_subs_inverse_matches_sympy(f):
    lhs = ratfunc_to_sympy(f.subs_inverse())
    rhs = ratfunc_to_sympy(f).subs(Q, 1 / Q)
    assert sympy.simplify(lhs - rhs) == 0


@given(st.dictionaries(st.integers(-6, 6), st.integers(-9, 9), max_size=5))
def test_laurent_roundtrip_and_membership(d):
    lp = LaurentPoly.from_dict(d)
    f = RatFunc.from_laurent(lp)
    ok, witness = laurent_membership(f, "Z_q_invq")
    assert ok and witness == lp
    assert laurent_membership(f, "Z_invq")[0] == (not lp or lp.max_exp <= 0)
    assert laurent_membership(f, "Z_q")[0] == (not lp or lp.min_exp >= 0)


def test_membership_rejects_non_integral():
    q = RatFunc([0, 1])
    assert not laurent_membership(1 / (1 - q), "Z_q_invq")[0]
    assert not laurent_membership(q / 2, "Z_q_invq")[0]
    assert laurent_membership((q**3 - 1) / q**3, "Z_invq")[0]


def test_jet_inverse_and_division():
    j = Jet([Fraction(2), Fraction(1), Fraction(3), Fraction(0)])
    one = j * j.invert()
    assert one == Jet([Fraction(1), Fraction(0), Fraction(0), Fraction(0)])
    eps = Jet.variable(3, Fraction(1))
    # (eps * j) / eps loses one order
    assert (eps * j) / eps == j.truncate(2)
    with pytest.raises(ZeroDivisionError):
        Jet([Fraction(1), Fraction(0)]) / Jet([Fraction(0), Fraction(0)])


@given(st.integers(-6, 6), st.integers(1, 5))
def test_linear_factor_jet_matches_series(power, c):
    e = sympy.Symbol("e")
    jet = jet_of_linear_factor(Fraction(c), 1, power, 4)
    series = sympy.series((c + e) ** power, e, 0, 5).removeO()
    for m in range(5):
        assert sympy.Rational(jet[m].numerator, jet[m].denominator) == series.coeff(e, m)


def test_jet_compose_inverse_substitution():
    # f(eps) = 1/(1+eps) composed with g(eps) = eps/(1-eps)... yields 1 - eps
    f = Jet([Fraction((-1) ** m) for m in range(5)])
    g = Jet([Fraction(0)] + [Fraction(1)] * 4)
    assert f.compose(g) == Jet([Fraction(1), Fraction(-1), Fraction(0), Fraction(0), Fraction(0)])


@given(coeff_lists, coeff_lists)
def test_backends_agree_on_mul(a, b):
    ck = pytest.importorskip("qzeta._ckernels")
    a, b = _pykernels.strip(a), _pykernels.strip(b)
    assert ck.mul(list(a), list(b)) == _pykernels.mul(a, b)


@given(st.lists(st.integers(-10**30, 10**30), min_size=60, max_size=90), st.lists(st.integers(-10**30, 10**30), min_size=50, max_size=70))
def test_backends_agree_on_large_mul(a, b):
    ck = pytest.importorskip("qzeta._ckernels")
    a, b = _pykernels.strip(a), _pykernels.strip(b)
    assert ck.mul(list(a), list(b)) == _pykernels.mul(a, b)


@given(coeff_lists, int_polys(nonzero=True))
def test_backends_agree_on_division(a, b):
    ck = pytest.importorskip("qzeta._ckernels")
    a = _pykernels.strip(a)
    b = list(b.coeffs)
    assert ck.divmod_exact(list(a), b) == _pykernels.divmod_exact(a, b)
    prod = _pykernels.mul(a, b)
    assert ck.divmod_exact(prod, b) == (a, [])


def test_zero_divisor_errors():
    with pytest.raises(ZeroDivisionError):
        RatFunc([1], [0])
    with pytest.raises(ZeroDivisionError):
        RatFunc([1]) / RatFunc([0])
    with pytest.raises(ZeroDivisionError):
        RatFunc([1], [-1, 1])(1)


def test_pure_python_fallback_matches_default_backend():
    import json
    import os
    import subprocess
    import sys

    code = (
        "import json, qzeta; from qzeta.linear_forms import FormParams, build_linear_form;"
        "print(json.dumps([qzeta.BACKEND, build_linear_form(FormParams(6, 2, 2)).to_json()], sort_keys=True))"
    )
    outs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, QZETA_PURE_PYTHON=flag)
        proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        outs[flag] = json.loads(proc.stdout)
    assert outs["1"][0] == "python"
    assert outs["1"][1] == outs["0"][1]
