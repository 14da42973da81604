"""Dimension bounds from the independence criterion and the inequalities they imply.

f(r;A) = (4rA + A - 4r^2) / ((24/pi^2 + 2)A + 8r^2)
g(r;A) = (4rA + A - 4r^2) / ((24/pi^2 + 2)A - 24/pi^2 + 8r^2)

f(A) and g(A) are the maxima over 1 <= r <= A/2.  Everything is evaluated
in interval arithmetic so strict inequalities come with certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from qzeta.numerics import IntervalValue, pi_interval

__all__ = [
    "BoundInputs",
    "CriterionRates",
    "pi_squared",
    "f_of",
    "g_of",
    "f_max",
    "g_max",
    "rates_for",
    "dimension_bound",
    "inequality_suite",
    "threshold_scan",
    "asymptotic_constant",
    "asymptotic_check",
    "criterion_table",
]

PRECISION = 192
# beyond this many candidates the maximum is located by a unimodal search
_FULL_SCAN_LIMIT = 4000


@lru_cache(maxsize=4)
def pi_squared(prec: int = PRECISION) -> IntervalValue:
    pi = pi_interval(prec)
    return pi * pi


@dataclass(frozen=True)
class BoundInputs:
    A: int
    r: int

    def __post_init__(self):
        if self.A < 4 or self.A % 2:
            raise ValueError(f"A must be an even integer >= 4, got {self.A}")
        if not 1 <= self.r <= self.A // 2:
            raise ValueError(f"r must lie in 1..{self.A // 2}, got {self.r}")

    @property
    def pi_sq(self) -> IntervalValue:
        return pi_squared()


def _numerator(A: int, r: int) -> int:
    return 4 * r * A + A - 4 * r * r


def f_of(r: int, A: int) -> IntervalValue:
    BoundInputs(A, r)
    c = 24 / pi_squared()
    return _numerator(A, r) / ((c + 2) * A + 8 * r * r)


def g_of(r: int, A: int) -> IntervalValue:
    BoundInputs(A, r)
    c = 24 / pi_squared()
    return _numerator(A, r) / ((c + 2) * A - c + 8 * r * r)


def _float_value(kind: str, r: int, A: int) -> float:
    c = 24 / 9.869604401089358
    den = (c + 2) * A + 8 * r * r - (c if kind == "g" else 0)
    return _numerator(A, r) / den


def _interval_max(values):
    """Enclosure of the maximum of several enclosures, with the leading index."""
    lo = max(v.lower for v in values)
    hi = max(v.upper for v in values)
    best = max(range(len(values)), key=lambda i: values[i].mid)
    return IntervalValue.from_bounds(lo, hi, PRECISION), best


def _maximise(kind: str, A: int):
    fn = f_of if kind == "f" else g_of
    top = A // 2
    if top <= _FULL_SCAN_LIMIT:
        cands = list(range(1, top + 1))
    else:
        # N concave and D convex positive make N/D quasi-concave in r, so the
        # integer maximum sits next to the float maximum; a window around it
        # is checked exactly below.
        lo, hi = 1, top
        while hi - lo > 2:
            m1 = lo + (hi - lo) // 3
            m2 = hi - (hi - lo) // 3
            if _float_value(kind, m1, A) < _float_value(kind, m2, A):
                lo = m1 + 1
            else:
                hi = m2 - 1
        cands = list(range(max(1, lo - 3), min(top, hi + 3) + 1))
    vals = [fn(r, A) for r in cands]
    enc, i = _interval_max(vals)
    r_best = cands[i]
    if len(cands) < top:
        # certify a strict local maximum at r_best (global by quasi-concavity)
        inner = vals[i]
        for j in (i - 1, i + 1):
            if 0 <= j < len(cands) and not inner.certainly_gt(vals[j]):
                raise ArithmeticError("could not certify the maximising r")
        if i in (0, len(cands) - 1) and cands[i] not in (1, top):
            raise ArithmeticError("maximum at the edge of the search window")
    return enc, r_best


@lru_cache(maxsize=None)
def f_max(A: int):
    """(enclosure of f(A), maximising r)."""
    BoundInputs(A, 1)
    return _maximise("f", A)


@lru_cache(maxsize=None)
def g_max(A: int):
    """(enclosure of g(A), maximising r)."""
    BoundInputs(A, 1)
    return _maximise("g", A)


@dataclass(frozen=True)
class CriterionRates:
    """Rates per unit of log|1/q|."""

    alpha1: IntervalValue
    alpha2: IntervalValue
    delta: IntervalValue

    def __post_init__(self):
        if not self.alpha2.certainly_gt(0):
            raise ValueError("alpha2 must be positive")


def rates_for(A: int, r: int) -> CriterionRates:
    """Rates from the asymptotics of the series, its coefficients and denominators."""
    BoundInputs(A, r)
    three_over_pi2 = 3 / pi_squared()
    alpha1 = -(Fraction(A, 8) + Fraction(r * r, 2) + A * three_over_pi2 - Fraction(r * (A - 2 * r), 2))
    alpha2 = Fraction(A, 4) + r * r + A * three_over_pi2
    return CriterionRates(alpha1, alpha2, three_over_pi2)


def dimension_bound(rates: CriterionRates, use_delta: bool) -> IntervalValue:
    if not use_delta:
        return 1 + rates.alpha1 / rates.alpha2
    den = rates.alpha2 - rates.delta
    if not den.certainly_gt(0):
        raise ValueError("alpha2 - delta must be positive")
    return 1 + (rates.alpha1 + rates.delta) / den


def _lt(a: IntervalValue, b) -> bool:
    return a.certainly_lt(b)


def inequality_suite() -> dict:
    """The three inequality chains, each strict step certified by disjoint enclosures."""
    f10, _ = f_max(10)
    g10, r10 = g_max(10)
    g2_10 = g_of(2, 10)
    f38, _ = f_max(38)
    g38, _ = g_max(38)
    f40, _ = f_max(40)
    g40, _ = g_max(40)
    f86, _ = f_max(86)
    g86, _ = g_max(86)
    chains = [
        {
            "name": "A=10",
            "statement": "f(10) < 1 < g(10), g(2;10) in (1.0010, 1.0020)",
            "pass": _lt(f10, 1)
            and g10.certainly_gt(1)
            and g2_10.certainly_gt(Fraction(10010, 10000))
            and g2_10.certainly_lt(Fraction(10020, 10000))
            and r10 == 2,
            "values": {"f(10)": f10, "g(10)": g10, "g(2;10)": g2_10},
        },
        {
            "name": "A=38,40",
            "statement": "f(38) < g(38) < 2 < f(40) < g(40)",
            "pass": _lt(f38, g38) and _lt(g38, 2) and f40.certainly_gt(2) and _lt(f40, g40),
            "values": {"f(38)": f38, "g(38)": g38, "f(40)": f40, "g(40)": g40},
        },
        {
            "name": "A=86",
            "statement": "f(86) < 3 < g(86)",
            "pass": _lt(f86, 3) and g86.certainly_gt(3),
            "values": {"f(86)": f86, "g(86)": g86},
        },
    ]
    return {"chains": chains, "pass": all(c["pass"] for c in chains)}


def threshold_scan(limit: int = 40) -> dict:
    """Smallest even A whose bound is certified above 1, with certified failures below it."""
    out = {}
    for kind, fn in (("f", f_max), ("g", g_max)):
        found = None
        below_ok = True
        for A in range(4, limit + 1, 2):
            val, _ = fn(A)
            if val.certainly_gt(1):
                found = A
                break
            if not val.certainly_lt(1):
                below_ok = False
        out[kind] = {"threshold": found, "certified": below_ok and found is not None}
    return out


def asymptotic_constant() -> IntervalValue:
    """pi / (2 sqrt(pi^2 + 12))."""
    pi = pi_interval(PRECISION)
    return pi / (2 * (pi_squared() + 12).sqrt())


def asymptotic_check(A: int = 10**6, tolerance: Fraction = Fraction(1, 100)) -> dict:
    g, r = g_max(A)
    ratio = g / IntervalValue(A, 0, PRECISION).sqrt()
    const = asymptotic_constant()
    gap = (ratio - const) / const
    ok = gap.abs_upper() < tolerance
    return {"A": A, "argmax_r": r, "ratio": ratio, "constant": const, "relative_gap": gap, "pass": ok}


def criterion_table(A_values) -> list:
    rows = []
    for A in A_values:
        f, rf = f_max(A)
        g, rg = g_max(A)
        rows.append(
            {
                "A": A,
                "argmax_r_f": rf,
                "argmax_r_g": rg,
                "f": f,
                "g": g,
                "g_ge_f": not g.certainly_lt(f),
            }
        )
    return rows
