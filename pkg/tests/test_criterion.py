import math
import random
from fractions import Fraction

import mpmath
import pytest

from qzeta.criterion import (
    BoundInputs,
    CriterionRates,
    asymptotic_check,
    asymptotic_constant,
    criterion_table,
    dimension_bound,
    f_max,
    f_of,
    g_max,
    g_of,
    inequality_suite,
    pi_squared,
    rates_for,
    threshold_scan,
)
from qzeta.numerics import IntervalValue



def mp_f(r, A, with_delta):
    c = 24 / mpmath.pi**2
    den = (c + 2) * A + 8 * r * r - (c if with_delta else 0)
    return (4 * r * A + A - 4 * r * r) / den


def mp_close(v: IntervalValue, x) -> bool:
    mid = mpmath.mpf(v.mid.numerator) / v.mid.denominator
    rad = mpmath.mpf(v.rad.numerator) / v.rad.denominator
    return abs(mid - x) <= rad + mpmath.mpf(2) ** -190


def test_numerator_and_sample_values():
    assert 4 * 2 * 10 + 10 - 4 * 4 == 74
    f = f_of(2, 10)
    g = g_of(2, 10)
    assert abs(float(f) - 0.9697) < 1e-4
    assert g.certainly_gt(Fraction(10010, 10000)) and g.certainly_lt(Fraction(10020, 10000))
    assert abs(float(g) - 1.0016) < 1e-4


@pytest.mark.parametrize("A", [4, 10, 38, 86, 200])
def test_bounds_match_mpmath(A):
    for r in range(1, A // 2 + 1):
        for fn, delta in ((f_of, False), (g_of, True)):
            assert mp_close(fn(r, A), mp_f(r, A, delta))


@pytest.mark.parametrize("A", range(4, 61, 2))
def test_g_exceeds_f_and_maxima_by_scan(A):
    for r in range(1, A // 2 + 1):
        assert g_of(r, A).certainly_gt(f_of(r, A))
    g, rg = g_max(A)
    best = max(range(1, A // 2 + 1), key=lambda r: mp_f(r, A, True))
    assert rg == best and 1 <= rg <= A // 2
    assert mp_close(g, mp_f(best, A, True))


def test_ternary_search_matches_full_scan():
    # both code paths agree at a size where a scan is still affordable
    from qzeta import criterion

    for A in (9000, 12000):
        scan = max(range(1, A // 2 + 1), key=lambda r: criterion._float_value("g", r, A))
        assert g_max(A)[1] == scan


def test_out_of_range_inputs():
    for A, r in ((3, 1), (10, 0), (10, 6), (2, 1)):
        with pytest.raises(ValueError):
            BoundInputs(A, r)


def test_pi_squared_enclosure():
    p = pi_squared()
    assert mp_close(p, mpmath.pi**2)
    assert p.rad < Fraction(1, 2**150)


def test_inequality_chains():
    rep = inequality_suite()
    assert rep["pass"]
    assert [c["name"] for c in rep["chains"]] == ["A=10", "A=38,40", "A=86"]


def test_thresholds():
    t = threshold_scan()
    assert t["g"] == {"threshold": 10, "certified": True}
    assert t["f"] == {"threshold": 12, "certified": True}


def test_asymptotic_constant_value():
    c = asymptotic_constant()
    assert abs(float(c) - float(mpmath.pi / (2 * mpmath.sqrt(mpmath.pi**2 + 12)))) < 1e-15
    # the two-decimal approximation 0.3359 is consistent
    assert abs(float(c) - 0.3359) < 1e-4


def test_asymptotic_check():
    rep = asymptotic_check(10**6)
    assert rep["pass"]
    assert rep["relative_gap"].abs_upper() < Fraction(1, 100)


def test_dimension_bound_reproduces_f_and_g():
    rng = random.Random(2024)
    for _ in range(20):
        A = 2 * rng.randint(2, 200)
        r = rng.randint(1, A // 2)
        rates = rates_for(A, r)
        with_delta = dimension_bound(rates, True)
        plain = dimension_bound(rates, False)
        g, f = g_of(r, A), f_of(r, A)
        assert abs(with_delta.mid - g.mid) / abs(g.mid) < Fraction(1, 10**20)
        assert abs(plain.mid - f.mid) / abs(f.mid) < Fraction(1, 10**20)
    assert abs(float(dimension_bound(rates_for(10, 2), True)) - float(g_of(2, 10))) < 1e-30
    assert abs(float(dimension_bound(rates_for(12, 2), False)) - float(f_of(2, 12))) < 1e-30


def test_zero_delta_reduces_to_plain_bound():
    rates = rates_for(12, 3)
    zero = CriterionRates(rates.alpha1, rates.alpha2, IntervalValue(0))
    a, b = dimension_bound(zero, True), dimension_bound(zero, False)
    assert abs(a.mid - b.mid) <= a.rad + b.rad


def test_rates_validation():
    with pytest.raises(ValueError):
        CriterionRates(IntervalValue(1), IntervalValue(-1), IntervalValue(0))
    with pytest.raises(ValueError):
        dimension_bound(CriterionRates(IntervalValue(1), IntervalValue(1), IntervalValue(2)), True)


def test_table_rows():
    rows = criterion_table(range(4, 201, 2))
    assert all(row["g_ge_f"] for row in rows)
    assert all(1 <= row["argmax_r_g"] <= row["A"] // 2 for row in rows)
    f10, _ = f_max(10)
    assert rows[3]["A"] == 10 and rows[3]["f"].mid == f10.mid
