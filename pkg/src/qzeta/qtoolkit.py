"""q-combinatorics: Pochhammer products, Gaussian coefficients, cyclotomic
polynomials, d_n(q), cyclotomic valuations and Stirling numbers.

Also hosts :class:`CycloFraction`, a Laurent numerator over a product of
cyclotomic polynomials.  Every denominator met in this package has that
shape, so sums can be formed by padding numerators instead of taking gcds.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from qzeta.exact_algebra import IntPoly, Jet, LaurentPoly, RatFunc

__all__ = [
    "pochhammer_poly",
    "q_factorial",
    "q_binomial",
    "q_multinomial",
    "cyclotomic",
    "divisors",
    "totient",
    "d_n",
    "d_n_inverse",
    "cyclotomic_valuation",
    "cyclotomic_ord",
    "stirling_unsigned",
    "bernoulli",
    "one_minus_qpow",
    "CycloFraction",
    "FracJet",
    "linear_power_jet",
    "power_jet",
    "u_power_jet",
    "u_pochhammer_jet",
]


def pochhammer_poly(a: int, k: int) -> LaurentPoly:
    """The product (1 - q^a)(1 - q^(a+1))...(1 - q^(a+k-1))."""
    if k < 0:
        raise ValueError("Pochhammer length must be non-negative")
    acc = LaurentPoly([1])
    for i in range(k):
        e = a + i
        if e == 0:
            return LaurentPoly()
        acc = acc * (LaurentPoly([1]) - LaurentPoly.monomial(e))
    return acc


@lru_cache(maxsize=None)
def q_factorial(n: int) -> IntPoly:
    """(q; q)_n as an integer polynomial."""
    if n < 0:
        raise ValueError("negative q-factorial")
    if n == 0:
        return IntPoly(1)
    return q_factorial(n - 1) * (IntPoly(1) - IntPoly.monomial(n))


def q_binomial(n: int, k: int) -> IntPoly:
    if not 0 <= k <= n:
        raise ValueError(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    return q_multinomial(n, [k])


def q_multinomial(n: int, parts) -> IntPoly:
    parts = list(parts)
    if any(p < 0 for p in parts):
        raise ValueError("negative part in q_multinomial")
    rest = n - sum(parts)
    if rest < 0:
        raise ValueError("parts exceed n in q_multinomial")
    den = IntPoly(1)
    for p in parts + [rest]:
        den = den * q_factorial(p)
    quot = q_factorial(n).exact_quotient(den)
    assert quot is not None
    return quot


@lru_cache(maxsize=None)
def divisors(t: int):
    return tuple(d for d in range(1, t + 1) if t % d == 0)


def totient(t: int) -> int:
    return sum(1 for d in range(1, t + 1) if gcd(d, t) == 1)


# lru_cache gives a write-once table: recomputation is idempotent, so a
# concurrent double insert is harmless.
@lru_cache(maxsize=None)
def cyclotomic(t: int) -> IntPoly:
    """phi_t(q), by dividing q^t - 1 by every phi_d with d a proper divisor."""
    if t < 1:
        raise ValueError("cyclotomic index must be >= 1")
    p = IntPoly.monomial(t) - 1
    for d in divisors(t)[:-1]:
        p = p.exact_quotient(cyclotomic(d))
    return p


@lru_cache(maxsize=None)
def d_n(n: int) -> IntPoly:
    """Monic lcm of q - 1, ..., q^n - 1, i.e. the product of phi_t for t <= n."""
    if n < 1:
        raise ValueError("d_n needs n >= 1")
    acc = IntPoly(1)
    for t in range(1, n + 1):
        acc = acc * cyclotomic(t)
    return acc


def d_n_inverse(n: int) -> LaurentPoly:
    """d_n(1/q), an element of Z[1/q]; d_0 is taken to be 1."""
    if n == 0:
        return LaurentPoly([1])
    return LaurentPoly.from_intpoly(d_n(n)).subs_inverse()


def cyclotomic_valuation(factors, t: int) -> int:
    """ord_{phi_t} of a product of factors (1 - q^m)^mult.

    ``factors`` is an iterable of ``(m, mult)`` pairs (or bare ``m``).
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    total = 0
    for f in factors:
        m, mult = (f, 1) if isinstance(f, int) else f
        if m < 1:
            raise ValueError("factor exponents must be >= 1")
        if m % t == 0:
            total += mult
    return total


def cyclotomic_ord(p, t: int) -> int:
    """Multiplicity of phi_t in an IntPoly or LaurentPoly (by repeated division)."""
    if isinstance(p, LaurentPoly):
        p = IntPoly(p.coeffs)
    if not p:
        raise ValueError("order of the zero polynomial is infinite")
    phi = cyclotomic(t)
    k = 0
    while True:
        quot = p.exact_quotient(phi)
        if quot is None:
            return k
        p, k = quot, k + 1


@lru_cache(maxsize=None)
def _rising_coeffs(s: int):
    # x(x+1)...(x+s-1), coefficients low degree first
    poly = [1]
    for i in range(s):
        nxt = [0] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] += c
            nxt[d] += i * c
        poly = nxt
    return tuple(poly)


def stirling_unsigned(s: int, j: int) -> int:
    if not 1 <= j <= s:
        raise ValueError(f"stirling_unsigned needs 1 <= j <= s, got s={s}, j={j}")
    return _rising_coeffs(s)[j]


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m with B_1 = -1/2."""
    if m < 0:
        raise ValueError("negative index")
    if m == 0:
        return Fraction(1)
    if m > 1 and m % 2:
        return Fraction(0)
    return -sum(comb(m + 1, k) * bernoulli(k) for k in range(m)) / (m + 1)


# --------------------------------------------------------------------------
# cyclotomic fractions


def one_minus_qpow(m: int):
    """Write 1 - q^m as ``unit * prod(phi_t)``; returns ``(unit, {t: 1})``.

    ``unit`` is a signed Laurent monomial.  m = 0 raises.
    """
    if m == 0:
        raise ZeroDivisionError("pole at expansion point")
    if m > 0:
        return LaurentPoly.monomial(0, -1), {t: 1 for t in divisors(m)}
    # 1 - q^-a = q^-a (q^a - 1)
    return LaurentPoly.monomial(m, 1), {t: 1 for t in divisors(-m)}


def _phi_power(t, e):
    return LaurentPoly.from_intpoly(_phi_pow_cached(t, e))


@lru_cache(maxsize=4096)
def _phi_pow_cached(t, e):
    return cyclotomic(t) ** e


class CycloFraction:
    """``scale * num / prod(phi_t ** mult)`` with a Laurent numerator.

    Not canonical; call :meth:`to_ratfunc` for a canonical value.
    """

    __slots__ = ("num", "den", "scale")

    def __init__(self, num=None, den=None, scale=1):
        if num is None:
            num = LaurentPoly()
        elif isinstance(num, int):
            num = LaurentPoly([num])
        self.num = num
        self.den = {t: m for t, m in (den or {}).items() if m}
        self.scale = Fraction(scale)
        if any(m < 0 for m in self.den.values()):
            raise ValueError("CycloFraction denominators must have non-negative multiplicities")

    def __bool__(self):
        return bool(self.num) and bool(self.scale)

    def __repr__(self):
        return f"CycloFraction({self.num!r}, {self.den!r}, {self.scale})"

    def _lift(self, den):
        num = self.num
        for t, m in den.items():
            extra = m - self.den.get(t, 0)
            if extra:
                num = num * _phi_power(t, extra)
        return num

    def __add__(self, other):
        if isinstance(other, (int, Fraction, LaurentPoly)):
            other = CycloFraction.lift(other)
        if not isinstance(other, CycloFraction):
            return NotImplemented
        if not other:
            return self
        if not self:
            return other
        den = dict(self.den)
        for t, m in other.den.items():
            if m > den.get(t, 0):
                den[t] = m
        sa, sb = self.scale, other.scale
        if sa == sb:
            return CycloFraction(self._lift(den) + other._lift(den), den, sa)
        L = sa.denominator * sb.denominator
        na = self._lift(den) * (sa.numerator * sb.denominator)
        nb = other._lift(den) * (sb.numerator * sa.denominator)
        return CycloFraction(na + nb, den, Fraction(1, L))

    __radd__ = __add__

    def __neg__(self):
        return CycloFraction(self.num, self.den, -self.scale)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloFraction(self.num, self.den, self.scale * other)
        if isinstance(other, LaurentPoly):
            return CycloFraction(self.num * other, self.den, self.scale)
        if not isinstance(other, CycloFraction):
            return NotImplemented
        den = dict(self.den)
        for t, m in other.den.items():
            den[t] = den.get(t, 0) + m
        return CycloFraction(self.num * other.num, den, self.scale * other.scale)

    __rmul__ = __mul__

    @classmethod
    def lift(cls, x):
        if isinstance(x, CycloFraction):
            return x
        if isinstance(x, Fraction):
            return cls(LaurentPoly([1]), {}, x)
        if isinstance(x, int):
            return cls(LaurentPoly([x]), {}, 1)
        if isinstance(x, LaurentPoly):
            return cls(x, {}, 1)
        raise TypeError(f"cannot lift {type(x).__name__}")

    @classmethod
    def inverse_one_minus_qpow(cls, m, power=1):
        """(1 - q^m)^(-power)."""
        unit, den = one_minus_qpow(m)
        return cls(unit ** (-power), {t: power for t in den}, 1)

    def shift(self, k):
        return CycloFraction(self.num.shift(k), self.den, self.scale)

    def subs_inverse(self):
        """Value at 1/q; phi_t is palindromic for t >= 2 and phi_1(1/q) = -phi_1(q)/q."""
        num = self.num.subs_inverse()
        shift = 0
        sign = 1
        for t, m in self.den.items():
            if t == 1:
                shift += m
                sign *= (-1) ** m
            else:
                shift += cyclotomic(t).degree * m
        return CycloFraction(num.shift(shift), self.den, self.scale * sign)

    def to_ratfunc(self) -> RatFunc:
        if not self:
            return RatFunc.const(0)
        low = self.num.low
        p = IntPoly(self.num.coeffs)
        den = IntPoly(1)
        for t in sorted(self.den):
            m = self.den[t]
            phi = cyclotomic(t)
            while m:
                quot = p.exact_quotient(phi)
                if quot is None:
                    break
                p, m = quot, m - 1
            if m:
                den = den * _phi_pow_cached(t, m)
        if low >= 0:
            p = p.shift(low)
        else:
            den = den.shift(-low)
        return RatFunc.from_coprime(p, den, self.scale)

    def __call__(self, x):
        x = Fraction(x)
        d = Fraction(1)
        for t, m in self.den.items():
            d *= cyclotomic(t)(x) ** m
        return self.scale * self.num(x) / d


def power_jet(c: LaurentPoly, cden: dict, tail: Jet, power: int, order: int):
    """Fraction-free jet of ``(C + tail(eps))**power``.

    ``C = c * prod(phi_t ** cden[t])`` with ``c`` a signed Laurent monomial,
    and ``tail`` a Laurent jet with zero constant term.  Negative powers only
    ever put cyclotomic factors in the denominator of the returned
    :class:`FracJet`.
    """
    cfull = c
    for t, m in cden.items():
        cfull = cfull * _phi_power(t, m)
    tail = tail.truncate(order)
    zero = LaurentPoly()
    total = [zero] * (order + 1)
    tpow = Jet.constant(LaurentPoly([1]), order)
    top = min(power, order) if power >= 0 else order
    for m in range(top + 1):
        if m:
            tpow = tpow * tail
        bc = comb(power, m) if power >= 0 else (-1) ** m * comb(-power + m - 1, m)
        if power >= 0:
            w = cfull ** (power - m) * bc
        else:
            # C^p = C^(p - K) * C^(K - m) for the m-th term
            w = cfull ** (order - m) * bc
        for i in range(m, order + 1):
            if tpow[i]:
                total[i] = total[i] + tpow[i] * w
    if power >= 0:
        return FracJet(Jet(total), {}, 1)
    k = order - power
    return FracJet(Jet(total), {t: mult * k for t, mult in cden.items()}, 1, c ** (-k))


def linear_power_jet(c: LaurentPoly, cden: dict, b: LaurentPoly, power: int, order: int):
    """Fraction-free jet of ``(C + b*eps)**power``, C as in :func:`power_jet`."""
    tail = Jet([LaurentPoly(), b] + [LaurentPoly()] * (order - 1)) if order else Jet([LaurentPoly()])
    return power_jet(c, cden, tail, power, order)


def u_power_jet(g: int, order: int) -> Jet:
    """Jet of (1 + eps)**g with integer coefficients (as Laurent constants)."""
    out = []
    for m in range(order + 1):
        bc = comb(g, m) if g >= 0 else (-1) ** m * comb(-g + m - 1, m)
        out.append(LaurentPoly([bc]))
    return Jet(out)


def u_pochhammer_jet(a: int, length: int, u_exp: int, order: int, power: int = 1):
    """Jet in eps = u - 1 of ``(q^a u^u_exp; q)_length ** power`` as a FracJet.

    For negative ``power`` no factor may vanish at u = 1.
    """
    ujet = u_power_jet(u_exp, order)
    acc = FracJet.from_jet(Jet.constant(LaurentPoly([1]), order))
    if power >= 0:
        num = Jet.constant(LaurentPoly([1]), order)
        for i in range(length):
            c = a + i
            # 1 - q^c u^g
            f = Jet([LaurentPoly([1]) - ujet[0].shift(c)] + [-(x.shift(c)) for x in ujet.coeffs[1:]])
            num = num * f
        return FracJet.from_jet(num**power)
    for i in range(length):
        c = a + i
        unit, cden = one_minus_qpow(c)
        tail = Jet([LaurentPoly()] + [-(x.shift(c)) for x in ujet.coeffs[1:]])
        acc = acc * power_jet(unit, cden, tail, power, order)
    return acc


class FracJet:
    """Jet ``unit * scale * N(eps) / prod(phi_t ** den[t])`` with Laurent coefficients in N."""

    __slots__ = ("jet", "den", "scale")

    def __init__(self, jet: Jet, den=None, scale=1, unit=None):
        if unit is not None:
            jet = jet * unit
        self.jet = jet
        self.den = {t: m for t, m in (den or {}).items() if m}
        self.scale = Fraction(scale)

    @property
    def order(self):
        return self.jet.order

    @classmethod
    def from_jet(cls, jet):
        return cls(jet, {}, 1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FracJet(self.jet, self.den, self.scale * other)
        if isinstance(other, LaurentPoly):
            return FracJet(self.jet * other, self.den, self.scale)
        if isinstance(other, Jet):
            return FracJet(self.jet * other, self.den, self.scale)
        if isinstance(other, CycloFraction):
            den = dict(self.den)
            for t, m in other.den.items():
                den[t] = den.get(t, 0) + m
            return FracJet(self.jet * other.num, den, self.scale * other.scale)
        den = dict(self.den)
        for t, m in other.den.items():
            den[t] = den.get(t, 0) + m
        return FracJet(self.jet * other.jet, den, self.scale * other.scale)

    __rmul__ = __mul__

    def __add__(self, other):
        den = dict(self.den)
        for t, m in other.den.items():
            if m > den.get(t, 0):
                den[t] = m

        def lifted(fj):
            lift = LaurentPoly([1])
            for t, m in den.items():
                extra = m - fj.den.get(t, 0)
                if extra:
                    lift = lift * _phi_power(t, extra)
            return fj.jet * lift if lift != LaurentPoly([1]) else fj.jet

        sa, sb = self.scale, other.scale
        ja, jb = lifted(self), lifted(other)
        if sa == sb:
            return FracJet(ja + jb, den, sa)
        return FracJet(
            ja * (sa.numerator * sb.denominator) + jb * (sb.numerator * sa.denominator),
            den,
            Fraction(1, sa.denominator * sb.denominator),
        )

    def __neg__(self):
        return FracJet(self.jet, self.den, -self.scale)

    def __sub__(self, other):
        return self + (-other)

    def coefficient(self, i) -> CycloFraction:
        return CycloFraction(self.jet[i], self.den, self.scale)

    def truncate(self, order):
        return FracJet(self.jet.truncate(order), self.den, self.scale)
