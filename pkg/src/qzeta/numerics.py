"""Rigorous evaluation of q-zeta values, the series S~_n(q) and related checks.

All enclosures are balls ``mid +/- rad`` with a dyadic rational midpoint kept
to a fixed number of significant bits and an outward-rounded radius.  Series
tails are bounded explicitly, so every returned ball contains the true value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from qzeta.exact_algebra import RatFunc
from qzeta.linear_forms import FormParams, LinearForm, build_linear_form
from qzeta.qtoolkit import bernoulli, d_n, stirling_unsigned

__all__ = [
    "IntervalValue",
    "QPoint",
    "parse_q",
    "pi_interval",
    "zeta_q",
    "zeta_q_divisor_sum",
    "rho_k",
    "eval_S_tilde",
    "eval_S_tilde_outside",
    "s_tilde_reflection_check",
    "linear_form_residual",
    "z_s",
    "z_s_identity_check",
    "eisenstein",
    "slope_target",
    "slope_estimate",
    "slope_table",
]

DEFAULT_PRECISION = 256
_RAD_BITS = 64


def _round_near(x: Fraction, prec: int):
    """Round x to ``prec`` significant bits; return (dyadic value, error bound)."""
    if not x:
        return Fraction(0), Fraction(0)
    num, den = x.numerator, x.denominator
    shift = prec - (abs(num).bit_length() - den.bit_length())
    d = den if shift >= 0 else den << -shift
    q, r = divmod(num << shift if shift >= 0 else num, d)
    if 2 * r >= d:
        q += 1
    scale = Fraction(1 << shift) if shift >= 0 else Fraction(1, 1 << -shift)
    val = Fraction(q) / scale
    # half an ulp, doubled for safety
    err = 1 / scale
    return val, err


def _round_up(x: Fraction) -> Fraction:
    """A dyadic upper bound of a non-negative x with _RAD_BITS bits."""
    if x <= 0:
        return Fraction(0)
    num, den = x.numerator, x.denominator
    shift = _RAD_BITS - (num.bit_length() - den.bit_length())
    if shift >= 0:
        q = -((-num << shift) // den)
        return Fraction(q, 1 << shift)
    q = -((-num) // (den << -shift))
    return Fraction(q << -shift)


def _round_down(x: Fraction) -> Fraction:
    if x <= 0:
        return -_round_up(-x)
    num, den = x.numerator, x.denominator
    shift = _RAD_BITS - (num.bit_length() - den.bit_length())
    if shift >= 0:
        return Fraction((num << shift) // den, 1 << shift)
    return Fraction((num // (den << -shift)) << -shift)


class IntervalValue:
    """Closed ball [mid - rad, mid + rad] with a ``prec``-bit dyadic midpoint."""

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad=0, prec: int = DEFAULT_PRECISION, exact: bool = False):
        mid = Fraction(mid)
        rad = Fraction(rad)
        if rad < 0:
            raise ValueError("radius must be non-negative")
        if exact:
            err = Fraction(0)
        else:
            mid, err = _round_near(mid, prec)
        self.mid = mid
        self.rad = _round_up(rad + err)
        self.prec = prec

    @classmethod
    def from_bounds(cls, lo, hi, prec: int = DEFAULT_PRECISION):
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        return cls((lo + hi) / 2, (hi - lo) / 2, prec)

    @property
    def lower(self) -> Fraction:
        return self.mid - self.rad

    @property
    def upper(self) -> Fraction:
        return self.mid + self.rad

    def contains(self, x) -> bool:
        return abs(Fraction(x) - self.mid) <= self.rad

    def contains_zero(self) -> bool:
        return self.contains(0)

    def contains_interval(self, other: "IntervalValue") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def abs_upper(self) -> Fraction:
        return abs(self.mid) + self.rad

    def abs_lower(self) -> Fraction:
        return max(Fraction(0), abs(self.mid) - self.rad)

    def _coerce(self, other):
        if isinstance(other, IntervalValue):
            return other
        if isinstance(other, (int, Fraction)):
            return IntervalValue(other, 0, self.prec, exact=True)
        return NotImplemented

    def __neg__(self):
        return IntervalValue(-self.mid, self.rad, self.prec, exact=True)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return IntervalValue(self.mid + other.mid, self.rad + other.rad, max(self.prec, other.prec))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        rad = abs(self.mid) * other.rad + abs(other.mid) * self.rad + self.rad * other.rad
        return IntervalValue(self.mid * other.mid, rad, max(self.prec, other.prec))

    __rmul__ = __mul__

    def inverse(self):
        m = abs(self.mid)
        if m <= self.rad:
            raise ZeroDivisionError("interval contains zero")
        rad = self.rad / (m * (m - self.rad))
        return IntervalValue(1 / self.mid, rad, self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = IntervalValue(1, 0, self.prec, exact=True)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def sqrt(self):
        if self.lower < 0:
            raise ValueError("square root of an interval reaching below zero")
        lo = _sqrt_bound(self.lower, self.prec + 8, up=False)
        hi = _sqrt_bound(self.upper, self.prec + 8, up=True)
        return IntervalValue.from_bounds(lo, hi, self.prec)

    def certainly_lt(self, other) -> bool:
        other = self._coerce(other)
        return self.upper < other.lower

    def certainly_gt(self, other) -> bool:
        other = self._coerce(other)
        return self.lower > other.upper

    def __float__(self):
        return float(self.mid)

    def log_abs(self) -> float:
        """log|mid| as a float; usable far below the float range."""
        m = abs(self.mid)
        if not m:
            raise ValueError("log of zero")
        return math.log(m.numerator) - math.log(m.denominator)

    def radius_log2(self) -> float:
        if not self.rad:
            return float("-inf")
        return math.log2(self.rad.numerator) - math.log2(self.rad.denominator)

    def to_decimal(self, digits: int = 30) -> str:
        return _decimal_string(self.mid, digits)

    def to_json(self, digits: int = 30) -> dict:
        return {
            "mid": _decimal_string(self.mid, digits),
            "rad": _decimal_string(self.rad, 6, sci=True),
            "contains_zero": self.contains_zero(),
        }

    def __repr__(self):
        return f"IntervalValue({_decimal_string(self.mid, 20)} +/- {_decimal_string(self.rad, 3, sci=True)})"


def _sqrt_bound(x: Fraction, bits: int, up: bool) -> Fraction:
    if x <= 0:
        return Fraction(0)
    scale = 1 << (2 * bits)
    n = x.numerator * scale // x.denominator
    s = math.isqrt(n)
    if up:
        # n was floored, so sqrt(x * scale) < sqrt(n + 1) <= s + 1
        return Fraction(s + 1, 1 << bits)
    return Fraction(s, 1 << bits)


def _decimal_string(x: Fraction, digits: int, sci: bool = False) -> str:
    """Deterministic decimal rendering with ``digits`` significant digits."""
    if not x:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    e = len(str(x.numerator)) - len(str(x.denominator))
    if Fraction(10) ** e > x:
        e -= 1
    scaled = x / Fraction(10) ** (e - digits + 1)
    mant = round(scaled)
    if mant >= 10**digits:
        mant //= 10
        e += 1
    s = str(mant)
    if sci or e < -6 or e > 20:
        body = s[0] + ("." + s[1:] if len(s) > 1 else "")
        return f"{sign}{body}e{e:+d}"
    if e >= 0:
        if e + 1 >= len(s):
            return sign + s + "0" * (e + 1 - len(s))
        return sign + s[: e + 1] + "." + s[e + 1 :]
    return sign + "0." + "0" * (-e - 1) + s


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QPoint:
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if not self.q:
            raise ValueError("q must be non-zero")

    def require_inside(self):
        if abs(self.q) >= 1:
            raise ValueError(f"need |q| < 1, got q = {self.q}")
        return self.q


def parse_q(text: str) -> QPoint:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse q from {text!r}") from exc
    return QPoint(value)


def _as_q(q) -> Fraction:
    if isinstance(q, QPoint):
        return q.require_inside()
    q = Fraction(q)
    return QPoint(q).require_inside()


def _atan_inv(x: int, bits: int):
    """arctan(1/x) as (lower, upper) by the alternating Taylor series."""
    total = Fraction(0)
    k = 0
    x2 = x * x
    power = Fraction(1, x)
    target = Fraction(1, 1 << (bits + 4))
    while True:
        term = power / (2 * k + 1)
        if term < target:
            # alternating with decreasing terms: the next term bounds the error
            lo, hi = (total - term, total) if k % 2 else (total, total + term)
            return lo, hi
        total += term if k % 2 == 0 else -term
        power /= x2
        k += 1


@lru_cache(maxsize=16)
def pi_interval(prec: int = DEFAULT_PRECISION) -> IntervalValue:
    """pi = 16 arctan(1/5) - 4 arctan(1/239), enclosed."""
    a_lo, a_hi = _atan_inv(5, prec + 8)
    b_lo, b_hi = _atan_inv(239, prec + 8)
    return IntervalValue.from_bounds(16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo, prec)


# --------------------------------------------------------------------------
# zeta_q


def _geometric_tail(first: Fraction, ratio: Fraction) -> Fraction:
    return first / (1 - ratio)


def zeta_q(s: int, q, precision_bits: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of sum_{k>=1} k^(s-1) q^k / (1 - q^k) for |q| < 1.

    Terms are rounded to a few guard bits beyond the target and the rounding
    errors are added to the radius, so partial sums stay dyadic.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    q = _as_q(q)
    x = abs(q)
    a, b = q.numerator, q.denominator
    target = Fraction(1, 1 << (precision_bits + 4)) * min(Fraction(1), x)
    work = precision_bits + 16
    total = Fraction(0)
    err = Fraction(0)
    ak, bk = 1, 1
    k = 0
    while True:
        k += 1
        ak *= a
        bk *= b
        val, e = _round_near(Fraction(k ** (s - 1) * ak, bk - ak), work)
        total += val
        err += e
        # tail over m > k: m^(s-1) |q|^m / (1 - |q|^(k+1)), ratio bounded at m = k+1
        nxt = k + 1
        ratio = Fraction(nxt + 1, nxt) ** (s - 1) * x
        if ratio < 1:
            an, bn = abs(ak * a), bk * b
            first = Fraction(nxt ** (s - 1) * an, bn - an)
            tail = _geometric_tail(first, ratio)
            if tail < target:
                return IntervalValue(total, tail + err, precision_bits)


def zeta_q_divisor_sum(s: int, q, precision_bits: int = DEFAULT_PRECISION, terms: int = 60) -> IntervalValue:
    """Enclosure of sum_m q^m sigma_(s-1)(m) summed over m <= terms, tail bounded.

    A second route to zeta_q; with few terms the radius is correspondingly wide.
    """
    q = _as_q(q)
    x = abs(q)
    total = Fraction(0)
    for m in range(1, terms + 1):
        sigma = sum(d ** (s - 1) for d in range(1, m + 1) if m % d == 0)
        total += q**m * sigma
    # sigma_(s-1)(m) <= m^s; ratio of m^s x^m is at most ((M+2)/(M+1))^s x beyond M
    nxt = terms + 1
    ratio = Fraction(nxt + 1, nxt) ** s * x
    if ratio >= 1:
        raise ValueError("too few terms for a geometric tail bound")
    tail = _geometric_tail(Fraction(nxt**s) * x**nxt, ratio)
    return IntervalValue(total, tail, precision_bits)


# --------------------------------------------------------------------------
# S~_n(q)


def _poch(a: Fraction, q: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= 1 - a * q**i
    return out


def rho_k(params: FormParams, k: int, q) -> Fraction:
    """The k-th term q^k (1 - q^(2k+n)) R~_n(q^k; q) of S~_n(q), exactly."""
    A, r, n = params.A, params.r, params.n
    q = Fraction(q)
    if k <= r * n:
        return Fraction(0)
    qk = q**k
    val = (1 - qk * qk * q**n) * qk ** ((A - 2 * r) * n // 2 + A // 2 - 1)
    val *= _poch(qk * q ** (-r * n), q, r * n) * _poch(qk * q ** (n + 1), q, r * n)
    val /= _poch(qk, q, n + 1) ** A
    return val * _poch(q, q, n) ** (A - 2 * r)


def _ratio_bound(params: FormParams, K: int, x: Fraction) -> Fraction:
    """Upper bound of |rho_(k+1) / rho_k| valid for every k >= K > rn."""
    A, r, n = params.A, params.r, params.n
    e = (A - 2 * r) * n // 2 + A // 2 - 1
    b = x**e
    b *= (1 + x ** (2 * K + n + 2)) / (1 - x ** (2 * K + n))
    b *= (1 + x ** (1 + K + n + r * n)) / (1 - x ** (K - r * n))
    b *= ((1 + x**K) / (1 - x ** (K + n + 1))) ** (A + 1)
    return b


def eval_S_tilde(params: FormParams, q, precision_bits: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of S~_n(q) = sum_{k>rn} rho_k(q), relative accuracy about 2^-precision_bits.

    The truncation index K is increased until a certified bound
    |rho_(k+1)/rho_k| <= c < 1 holds for all k >= K and the geometric tail
    falls below the target.  For n = 0 the ratio tends to |q|^(A/2-1), which
    may equal 1/2, so the certificate only asks for c < 1.
    """
    q = _as_q(q)
    x = abs(q)
    start = params.r * params.n + 1
    first = rho_k(params, start, q)
    target = abs(first) / (1 << (precision_bits + 4))
    total = first
    k = start
    while True:
        k += 1
        term = rho_k(params, k, q)
        total += term
        ratio = _ratio_bound(params, k, x)
        if ratio < 1:
            # every later term is at most |term| * ratio^m
            tail = abs(term) * ratio / (1 - ratio)
            if tail < target:
                return IntervalValue(total, tail, precision_bits)


def _outside_ratio_bound(params: FormParams, K: int, X: Fraction) -> Fraction:
    """Bound of |rho_(k+1) / rho_k| for all k >= K > rn when |q| = X > 1."""
    A, r, n = params.A, params.r, params.n
    t = 1 / X
    rn = r * n
    # overall power of X is 3 + deg_T R~_n, negative for every valid (A, r, n)
    b = X ** (3 + params.t_exponent + 2 * rn) * t ** (A * (n + 1))
    b *= (1 + t ** (2 * K + n + 2)) / (1 - t ** (2 * K + n))
    b *= ((1 + t ** (K - rn + 1)) / (1 - t ** (K - rn))) ** rn
    b *= ((1 + t ** (K + n + 2)) / (1 - t ** (K + n + 1))) ** rn
    b *= ((1 + t**K) / (1 - t ** (K + 1))) ** (A * (n + 1))
    return b


def eval_S_tilde_outside(params: FormParams, q, precision_bits: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of the same series sum_{k>rn} rho_k(q) at a rational q with |q| > 1.

    The tail is bounded by the largest term seen so far times 2^-precision_bits.
    """
    q = QPoint(q).q
    X = abs(q)
    if X <= 1:
        raise ValueError(f"need |q| > 1, got q = {q}")
    k = params.r * params.n + 1
    total = term = rho_k(params, k, q)
    biggest = abs(term)
    while True:
        k += 1
        term = rho_k(params, k, q)
        total += term
        biggest = max(biggest, abs(term))
        ratio = _outside_ratio_bound(params, k, X)
        if ratio < 1:
            tail = abs(term) * ratio / (1 - ratio)
            if tail < biggest / (1 << (precision_bits + 4)):
                return IntervalValue(total, tail, precision_bits)


def s_tilde_reflection_check(params: FormParams, q, precision_bits: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of S~_n(1/q) + q^(n(r-1)) S~_n(q); it should contain 0."""
    q = _as_q(q)
    outside = eval_S_tilde_outside(params, 1 / q, precision_bits)
    inside = eval_S_tilde(params, q, precision_bits)
    return outside + inside * q ** (params.n * (params.r - 1))


def _eval_ratfunc(f: RatFunc, q: Fraction) -> Fraction:
    return f(q)


def linear_form_residual(form: LinearForm, q, precision_bits: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of S~_n(q) - P^_0(q) - sum_j P^_j(q) zeta_q(j)."""
    q = _as_q(q)
    p0 = _eval_ratfunc(form.p_hat_0, q)
    coeffs = {j: _eval_ratfunc(f, q) for j, f in sorted(form.p_hat_odd.items())}
    # guard bits so that large coefficients do not swamp the zeta enclosures
    big = max([abs(c) for c in coeffs.values()] + [abs(p0), Fraction(1)])
    guard = max(0, big.numerator.bit_length() - big.denominator.bit_length() + 1)
    work = precision_bits + guard
    acc = eval_S_tilde(form.params, q, work) - IntervalValue(p0, 0, work)
    for j, c in coeffs.items():
        if c:
            acc = acc - zeta_q(j, q, work) * IntervalValue(c, 0, work)
    return IntervalValue(acc.mid, acc.rad, precision_bits)


# --------------------------------------------------------------------------
# Z_s(q) - Z_s(1/q)


def z_s(s: int, q, precision_bits: int = DEFAULT_PRECISION, inverse: bool = False) -> IntervalValue:
    """Enclosure of sum_{k>=1} t^k / (1 - t^k)^s with t = q, or t = 1/q when ``inverse``."""
    q = _as_q(q)
    x = abs(q)
    if inverse and s < 2:
        raise ValueError("the series at 1/q diverges for s < 2")
    t = 1 / q if inverse else q
    target = Fraction(1, 1 << (precision_bits + 4)) * min(Fraction(1), x)
    total = Fraction(0)
    k = 0
    while True:
        k += 1
        tk = t**k
        total += tk / (1 - tk) ** s
        nxt = k + 1
        xn = x**nxt
        # |t^m/(1-t^m)^s| <= x^(m e) / (1 - x^m)^s with e = s - 1 at 1/q and e = 1 at q
        e = s - 1 if inverse else 1
        tail = x ** (nxt * e) / ((1 - x**e) * (1 - xn) ** s)
        if tail < target:
            return IntervalValue(total, tail, precision_bits)


def z_s_identity_check(s: int, q, precision_bits: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of Z_s(q) - Z_s(1/q) - 2/(s-1)! sum_{odd j=3..s} c(s-1,j-1) zeta_q(j)."""
    if s < 2:
        raise ValueError("s must be at least 2")
    q = _as_q(q)
    acc = z_s(s, q, precision_bits) - z_s(s, q, precision_bits, inverse=True)
    w = Fraction(2, math.factorial(s - 1))
    for j in range(3, s + 1, 2):
        c = stirling_unsigned(s - 1, j - 1)
        if c:
            acc = acc - zeta_q(j, q, precision_bits) * (w * c)
    return acc


def eisenstein(m: int, q, precision_bits: int = DEFAULT_PRECISION) -> IntervalValue:
    """E_2m(q) = 1 - (4m / B_2m) zeta_q(2m)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    b = bernoulli(2 * m)
    return 1 - zeta_q(2 * m, q, precision_bits) * Fraction(4 * m) / b


# --------------------------------------------------------------------------
# slopes


def slope_target(quantity: str, params: FormParams, q) -> float:
    """Limit of (1/n^2) log|value| predicted for each quantity."""
    A, r = params.A, params.r
    lq = math.log(abs(1 / Fraction(q)))
    if quantity == "S_tilde":
        return -0.5 * r * (A - 2 * r) * lq
    if quantity == "d_n":
        pi = float(pi_interval(128))
        return 3 / pi**2 * lq
    if quantity == "P_hat_max":
        return (A + 4 * r * r) / 8 * lq
    raise ValueError(f"unknown quantity {quantity!r}")


def _log_abs_fraction(x: Fraction) -> float:
    x = abs(x)
    return math.log(x.numerator) - math.log(x.denominator)


def _slope_at(quantity: str, params: FormParams, q: Fraction, n: int, precision_bits: int):
    p = FormParams(params.A, params.r, n)
    if quantity == "S_tilde":
        val = eval_S_tilde(p, q, precision_bits)
        if val.contains_zero():
            return None
        return val.log_abs() / n**2
    if quantity == "d_n":
        v = d_n(n)(1 / q)
        return _log_abs_fraction(v) / n**2 if v else None
    if quantity == "P_hat_max":
        form = build_linear_form(p)
        vals = [abs(form.p_hat_0(q))] + [abs(f(q)) for f in form.p_hat_odd.values()]
        best = max(vals)
        return _log_abs_fraction(best) / n**2 if best else None
    raise ValueError(f"unknown quantity {quantity!r}")


def _slope_job(args):
    return _slope_at(*args)


def slope_estimate(quantity: str, params: FormParams, q, n_range, precision_bits: int = 128, jobs: int = 1):
    """List of (n, (1/n^2) log|value|); None marks an undefined entry."""
    q = _as_q(q)
    ns = list(n_range)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_range must be increasing")
    if any(n < 1 for n in ns):
        raise ValueError("n must be positive")
    tasks = [(quantity, params, q, n, precision_bits) for n in ns]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            slopes = list(ex.map(_slope_job, tasks))
    else:
        slopes = [_slope_job(t) for t in tasks]
    return list(zip(ns, slopes))


def slope_table(quantity: str, params: FormParams, q, n_range, precision_bits: int = 128, jobs: int = 1):
    """Rows (n, slope, target, relative_gap)."""
    target = slope_target(quantity, params, q)
    rows = []
    for n, slope in slope_estimate(quantity, params, q, n_range, precision_bits, jobs):
        gap = None if slope is None else abs(slope - target) / abs(target)
        rows.append({"n": n, "slope": slope, "target": target, "relative_gap": gap})
    return rows
