import json
from fractions import Fraction

import pytest
import sympy

from qzeta.exact_algebra import RatFunc
from qzeta.linear_forms import (
    FormParams,
    LinearForm,
    build_linear_form,
    coefficients,
    p1_derivative_at_1,
    p_tilde_0_at_1,
    p_tilde_s,
    p_tilde_s_at_1,
    ratfunc_from_json,
    ratfunc_to_json,
    rtilde_degree,
    rtilde_local_jet,
    rtilde_value,
)
from qzeta.numerics import linear_form_residual, rho_k, zeta_q

T = sympy.Symbol("T")
GRID = [(4, 1, n) for n in range(1, 5)] + [(6, 1, n) for n in range(1, 4)] + [(6, 2, n) for n in range(1, 4)]


def sym_rtilde(params, qv):
    A, r, n = params.A, params.r, params.n
    expr = T**params.t_exponent * qv**params.q_prefactor
    for i in range(1, n + 1):
        expr *= (1 - qv**i) ** (A - 2 * r)
    for i in range(r * n):
        expr *= (1 - qv ** (-r * n + i) * T) * (1 - qv ** (n + 1 + i) * T)
    for i in range(n + 1):
        expr /= (T - qv ** (-i)) ** A
    return expr


def frac(x):
    return Fraction(int(x.p), int(x.q))


@pytest.fixture(scope="module")
def tables():
    return {p: coefficients(FormParams(*p)) for p in GRID + [(4, 1, 0), (6, 1, 0)]}


@pytest.mark.parametrize("params", [(4, 1, 1), (4, 1, 2), (6, 1, 1), (6, 2, 1)])
@pytest.mark.parametrize("qv", [Fraction(2, 7), Fraction(-3, 5)])
def test_coefficients_match_linear_system(params, qv, tables):
    # unknowns c[s, j]; one equation sum c/(T - q^-j)^s = R(T) per sample point
    p = FormParams(*params)
    keys = [(s, j) for s in range(1, p.A + 1) for j in range(p.n + 1)]
    rows, rhs = [], []
    for i in range(len(keys)):
        Tv = Fraction(11 + 5 * i, 3 + 2 * i)
        rows.append([sympy.Rational(1) / sympy.Rational(str(Tv - qv ** (-j))) ** s for s, j in keys])
        rhs.append(sympy.Rational(str(rtilde_value(p, Tv, qv))))
    sol = sympy.Matrix(rows).LUsolve(sympy.Matrix(rhs))
    table = tables[params]
    for key, val in zip(keys, sol):
        assert table.c_tilde[key](qv) == frac(val), key


@pytest.mark.parametrize("params", GRID)
def test_partial_fraction_reconstruction(params, tables):
    p = FormParams(*params)
    table = tables[params]
    qv = Fraction(2, 5)
    # A + n + 3 sample points pin down the identity of rational functions in T
    for i in range(p.A + p.n + 3):
        Tv = Fraction(7 + 3 * i, 2 + i)
        total = sum(c(qv) / (Tv - qv ** (-j)) ** s for (s, j), c in table.c_tilde.items())
        assert total == rtilde_value(p, Tv, qv)


@pytest.mark.parametrize("params", GRID)
def test_residue_sum_vanishes(params, tables):
    table = tables[params]
    assert sum((table.c_tilde[1, j] for j in range(params[2] + 1)), RatFunc.const(0)) == RatFunc.const(0)


@pytest.mark.parametrize("params", GRID)
def test_coefficient_reflection(params, tables):
    A, r, n = params
    table = tables[params]
    for (s, j), c in table.c_tilde.items():
        assert table.c_tilde[s, n - j].subs_inverse() == c * RatFunc.q_power(n * (s + r - 2))


@pytest.mark.parametrize("params", GRID)
def test_p_tilde_functional_equation(params, tables):
    # P(1/z, 1/q) = z^-n q^(n(r-1)) P(z, q), compared coefficient by coefficient
    A, r, n = params
    table = tables[params]
    for s in range(1, A + 1):
        a = p_tilde_s(table, s)
        for j in range(n + 1):
            assert a[j].subs_inverse() == RatFunc.q_power(n * (r - 1)) * a[n - j]


def test_d_tilde_consistency(tables):
    table = tables[4, 1, 2]
    for (s, j), c in table.c_tilde.items():
        assert table.d_tilde(s, j) == c * RatFunc.q_power(j * s) * (-1) ** s


def test_rtilde_degree():
    for A, r, n in GRID:
        p = FormParams(A, r, n)
        expr = sympy.together(sym_rtilde(p, sympy.Rational(1, 3)))
        num, den = sympy.fraction(expr)
        assert rtilde_degree(p) == sympy.degree(num, T) - sympy.degree(den, T)
        assert 2 * rtilde_degree(p) == -(n + 1) * (A - 2 * r) - 2 * r - 4


@pytest.mark.parametrize("params", [(4, 1, 2), (6, 2, 2)])
def test_local_jet_constant_term(params):
    p = FormParams(*params)
    qv = Fraction(3, 7)
    for j in range(p.n + 1):
        jet = rtilde_local_jet(p, j, p.A - 1)
        Tv = qv ** (-j)
        direct = Tv**p.t_exponent * qv**p.q_prefactor
        for i in range(1, p.n + 1):
            direct *= (1 - qv**i) ** (p.A - 2 * p.r)
        for i in range(p.r * p.n):
            direct *= (1 - qv ** (-p.r * p.n + i) * Tv) * (1 - qv ** (p.n + 1 + i) * Tv)
        for i in range(p.n + 1):
            if i != j:
                direct /= (Tv - qv ** (-i)) ** p.A
        assert jet[0](qv) == direct
        # c~[A, j] is that constant term, c~[1, j] the top jet coefficient
        assert coefficients(p).c_tilde[p.A, j] == jet[0]
        assert coefficients(p).c_tilde[1, j] == jet[p.A - 1]


@pytest.mark.parametrize("params", [(4, 1, 1), (4, 1, 3), (6, 1, 2)])
def test_p_tilde_0_matches_naive_triple_sum(params, tables):
    A, r, n = params
    table = tables[params]
    for qv in (Fraction(1, 3), Fraction(-2, 5)):
        naive = Fraction(0)
        for s in range(1, A + 1):
            for j in range(1, n + 1):
                for k in range(1, j + 1):
                    naive += (-1) ** s * table.c_tilde[s, j](qv) * qv ** (k + j * (s - 1)) / (1 - qv**k) ** s
        assert p_tilde_0_at_1(table, "q")(qv) == naive
        assert p_tilde_0_at_1(table, "1/q")(qv) == p_tilde_0_at_1(table, "q")(1 / qv)


def test_p_tilde_0_empty_for_n_zero(tables):
    assert p_tilde_0_at_1(tables[4, 1, 0]) == RatFunc.const(0)
    assert p1_derivative_at_1(tables[6, 1, 0]) == RatFunc.const(0)


@pytest.mark.parametrize("params", [(4, 1, 2), (6, 2, 3)])
def test_p1_derivative_direct(params, tables):
    table = tables[params]
    qv = Fraction(5, 11)
    direct = -sum(j * table.c_tilde[1, j](qv) for j in range(params[2] + 1))
    assert p1_derivative_at_1(table)(qv) == direct
    # derivative of the z-polynomial P~_1 at z = 1
    coeffs = p_tilde_s(table, 1)
    assert sum((j * c for j, c in enumerate(coeffs)), RatFunc.const(0)) == p1_derivative_at_1(table)
    assert sum(coeffs, RatFunc.const(0)) == p_tilde_s_at_1(table, 1)


def test_n_zero_form_is_zeta_three():
    form = build_linear_form(FormParams(4, 1, 0))
    assert form.p_hat_0 == RatFunc.const(0)
    assert form.p_hat_odd == {3: RatFunc.const(1)}


def test_n_zero_series_is_lambert_series():
    # sum_k x^k (1+x^k)/(1-x^k)^3 regrouped as sum_m m^2 x^m/(1-x^m)
    p = FormParams(4, 1, 0)
    q = Fraction(1, 2)
    for k in range(1, 30):
        x = q**k
        assert rho_k(p, k, q) == x * (1 + x) / (1 - x) ** 3
    lhs = sum(rho_k(p, k, q) for k in range(1, 400))
    rhs = sum(Fraction(m * m) * q**m / (1 - q**m) for m in range(1, 400))
    assert abs(lhs - rhs) < Fraction(1, 2**300)
    z = zeta_q(3, q, 128)
    # truncated oracle is within 2^-300 of the true value
    assert abs(z.mid - rhs) <= z.rad + Fraction(1, 2**300)


def test_only_odd_indices_appear():
    for A, r in ((4, 1), (6, 1), (6, 2)):
        form = build_linear_form(FormParams(A, r, 2))
        assert sorted(form.p_hat_odd) == list(range(3, A, 2))


@pytest.mark.parametrize("n", range(1, 5))
def test_residual_at_one_half(n):
    form = build_linear_form(FormParams(4, 1, n))
    res = linear_form_residual(form, Fraction(1, 2), 256)
    assert res.contains_zero() and res.rad < Fraction(1, 2**64)


def test_json_roundtrip():
    form = build_linear_form(FormParams(6, 1, 2))
    text = json.dumps(form.to_json(), sort_keys=True)
    back = LinearForm.from_json(json.loads(text))
    assert back.p_hat_0 == form.p_hat_0 and back.p_hat_odd == form.p_hat_odd
    f = RatFunc([3, 0, -12345678901234567890123], [1, 5], Fraction(-7, 9))
    assert ratfunc_from_json(json.loads(json.dumps(ratfunc_to_json(f)))) == f
    assert all(isinstance(v, str) for v in ratfunc_to_json(f)["num"].values())


def test_parallel_table_matches_serial():
    p = FormParams(6, 1, 3)
    assert coefficients(p, jobs=2).c_tilde == coefficients(p).c_tilde


@pytest.mark.parametrize("bad", [(4, 2, 1), (5, 1, 1), (4, 0, 1), (4, 1, -1), (2, 0, 1)])
def test_invalid_parameters_rejected(bad):
    with pytest.raises(ValueError):
        FormParams(*bad)


def test_extended_parameters_allowed():
    assert FormParams(2, 1, 3, extended=True).A == 2
    with pytest.raises(ValueError):
        FormParams(2, -1, 3, extended=True)
