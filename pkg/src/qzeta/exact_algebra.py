"""Exact arithmetic in Z[q], Z[q, 1/q], Q(q) and truncated jets over them.

Everything here is immutable.  Rational functions are kept in a canonical
form (see :class:`RatFunc`) so that equality is a structural comparison.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, gcd, isqrt

from qzeta import _kernels as K

BigRat = Fraction

__all__ = [
    "BigRat",
    "IntPoly",
    "LaurentPoly",
    "RatFunc",
    "Jet",
    "poly_gcd",
    "jet_of_linear_factor",
    "laurent_membership",
    "RINGS",
]


def _binom(p, m):
    """Generalised binomial coefficient C(p, m) for integer p, m >= 0."""
    if p >= 0:
        return comb(p, m)
    # C(-a, m) = (-1)^m C(a + m - 1, m)
    return (-1) ** m * comb(-p + m - 1, m)


class IntPoly:
    """Dense polynomial in q with integer coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, int):
            coeffs = (coeffs,)
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def _raw(cls, coeffs):
        p = object.__new__(cls)
        p.coeffs = tuple(coeffs)
        return p

    @classmethod
    def monomial(cls, k, c=1):
        if k < 0:
            raise ValueError("negative exponent in IntPoly")
        return cls._raw([0] * k + [c]) if c else cls._raw(())

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly(other)
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("IntPoly", self.coeffs))

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        return _format_terms(enumerate(self.coeffs))

    def __neg__(self):
        return IntPoly._raw([-c for c in self.coeffs])

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPoly(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return IntPoly._raw(())
            return IntPoly._raw([c * other for c in self.coeffs])
        if not isinstance(other, IntPoly):
            return NotImplemented
        return IntPoly._raw(K.mul(list(self.coeffs), list(other.coeffs)))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power of IntPoly")
        result = IntPoly(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def content(self):
        return K.content(list(self.coeffs))

    def primitive(self):
        """Return ``(c, p)`` with ``self == c * p``, p primitive, lc(p) > 0."""
        if not self.coeffs:
            return 0, self
        c = self.content()
        if self.coeffs[-1] < 0:
            c = -c
        if c == 1:
            return 1, self
        return c, IntPoly._raw([x // c for x in self.coeffs])

    def divmod_exact(self, other):
        """Integer-coefficient division; ``None`` if a quotient coefficient is fractional."""
        if not other:
            raise ZeroDivisionError("zero divisor")
        res = K.divmod_exact(list(self.coeffs), list(other.coeffs))
        if res is None:
            return None
        return IntPoly._raw(res[0]), IntPoly._raw(res[1])

    def exact_quotient(self, other):
        """``self / other`` when the division is exact in Z[q]; otherwise ``None``."""
        res = self.divmod_exact(other)
        if res is None or res[1]:
            return None
        return res[0]

    def valuation(self):
        """Largest v with q^v dividing self (0 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return 0

    def shift(self, k):
        """Multiply by q^k (k may be negative if the division is exact)."""
        if k >= 0:
            return IntPoly._raw([0] * k + list(self.coeffs)) if self.coeffs else self
        if any(self.coeffs[:-k]):
            raise ValueError("shift would produce negative exponents")
        return IntPoly._raw(self.coeffs[-k:])

    def reversed(self):
        return IntPoly(reversed(self.coeffs))

    def __call__(self, x):
        if isinstance(x, int):
            return K.evaluate(list(self.coeffs), x)
        if isinstance(x, Fraction):
            # homogenised Horner keeps the arithmetic in integers
            n, d = x.numerator, x.denominator
            acc, dpow = 0, 1
            for c in reversed(self.coeffs):
                acc = acc * n + c * dpow
                dpow *= d
            return Fraction(acc, dpow // d) if self.coeffs else Fraction(0)
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return IntPoly([i * c for i, c in enumerate(self.coeffs)][1:])


def _format_terms(items, var="q"):
    parts = []
    for e, c in items:
        if not c:
            continue
        if e == 0:
            mono = ""
        elif e == 1:
            mono = var
        else:
            mono = f"{var}^{e}" if e > 0 else f"{var}^({e})"
        if mono and abs(c) == 1:
            term = ("-" if c < 0 else "+") + mono
        else:
            term = f"{c:+d}" + ("*" + mono if mono else "")
        parts.append(term)
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s[0] == "+" else s


# --------------------------------------------------------------------------
# gcd in Z[q]


def _maxnorm(c):
    return max(abs(x) for x in c)


def _prs_gcd(f, g):
    """Primitive pseudo-remainder sequence; f, g primitive lists."""
    if len(f) < len(g):
        f, g = g, f
    while g:
        lc = g[-1]
        r = list(f)
        dg = len(g) - 1
        while len(r) - 1 >= dg and r:
            c = r[-1]
            shift = len(r) - 1 - dg
            r = [x * lc for x in r]
            for i, gi in enumerate(g):
                r[i + shift] -= c * gi
            while r and not r[-1]:
                r.pop()
        if r:
            cont = K.content(r)
            r = [x // cont for x in r]
        f, g = g, r
    if f[-1] < 0:
        f = [-x for x in f]
    return f


def _heu_gcd(f, g):
    """Heuristic gcd of primitive, q-free integer polynomials (as lists).

    The evaluation point always exceeds 2*min(|f|, |g|) + 2, so a candidate
    whose primitive part divides both inputs is the true gcd.
    """
    nf, ng = _maxnorm(f), _maxnorm(g)
    bound = 2 * min(nf, ng) + 29
    x = max(min(bound, 99 * isqrt(bound)), 2 * min(nf // abs(f[-1]), ng // abs(g[-1])) + 2)
    x = max(x, 2 * min(nf, ng) + 3)
    for _ in range(8):
        ff = K.evaluate(f, x)
        gg = K.evaluate(g, x)
        if ff and gg:
            h = gcd(ff, gg)
            digits = []
            half = x // 2
            while h:
                r = h % x
                if r > half:
                    r -= x
                digits.append(r)
                h = (h - r) // x
            while digits and not digits[-1]:
                digits.pop()
            if digits:
                cont = K.content(digits)
                if digits[-1] < 0:
                    cont = -cont
                cand = [d // cont for d in digits]
                qf = K.divmod_exact(f, cand)
                if qf is not None and not qf[1]:
                    qg = K.divmod_exact(g, cand)
                    if qg is not None and not qg[1]:
                        return cand
        x = 73794 * x * isqrt(isqrt(x)) // 27011
    return _prs_gcd(f, g)


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd with positive leading coefficient (content ignored)."""
    if not a:
        return b.primitive()[1] if b else IntPoly(1)
    if not b:
        return a.primitive()[1]
    va, vb = a.valuation(), b.valuation()
    v = min(va, vb)
    fa = list(a.coeffs[va:])
    fb = list(b.coeffs[vb:])
    if len(fa) == 1 or len(fb) == 1:
        core = [1]
    else:
        ca, cb = K.content(fa), K.content(fb)
        fa = [x // ca for x in fa]
        fb = [x // cb for x in fb]
        if fa == fb or fa == [-x for x in fb]:
            core = fa
        else:
            core = _heu_gcd(fa, fb)
        if core[-1] < 0:
            core = [-x for x in core]
    return IntPoly._raw([0] * v + core)


# --------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Element of Z[q, 1/q]: ``sum(coeffs[i] * q**(low + i))``."""

    __slots__ = ("low", "coeffs")

    def __init__(self, coeffs=(), low=0):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        i = 0
        while i < len(c) and not c[i]:
            i += 1
        self.coeffs = tuple(c[i:])
        self.low = low + i if self.coeffs else 0

    @classmethod
    def from_dict(cls, terms):
        terms = {e: c for e, c in terms.items() if c}
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        return cls([terms.get(e, 0) for e in range(lo, hi + 1)], lo)

    @classmethod
    def monomial(cls, k, c=1):
        return cls([c], k)

    @classmethod
    def from_intpoly(cls, p, shift=0):
        return cls(p.coeffs, shift)

    def terms(self):
        return {self.low + i: c for i, c in enumerate(self.coeffs) if c}

    @property
    def min_exp(self):
        return self.low

    @property
    def max_exp(self):
        return self.low + len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly([other])
        return isinstance(other, LaurentPoly) and (self.low, self.coeffs) == (other.low, other.coeffs)

    def __hash__(self):
        return hash(("LaurentPoly", self.low, self.coeffs))

    def __repr__(self):
        return f"LaurentPoly({list(self.coeffs)}, low={self.low})"

    def __str__(self):
        return _format_terms(sorted(self.terms().items()))

    def __neg__(self):
        return LaurentPoly([-c for c in self.coeffs], self.low)

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly([other])
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not self.coeffs:
            return other
        if not other.coeffs:
            return self
        lo = min(self.low, other.low)
        hi = max(self.max_exp, other.max_exp)
        out = [0] * (hi - lo + 1)
        for i, c in enumerate(self.coeffs):
            out[self.low - lo + i] += c
        for i, c in enumerate(other.coeffs):
            out[other.low - lo + i] += c
        return LaurentPoly(out, lo)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly([other])
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly([c * other for c in self.coeffs], self.low)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return LaurentPoly()
        return LaurentPoly(K.mul(list(self.coeffs), list(other.coeffs)), self.low + other.low)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            if len(self.coeffs) == 1 and abs(self.coeffs[0]) == 1:
                return LaurentPoly([self.coeffs[0] ** (-e)], self.low * e)
            raise ValueError("only units of Z[q,1/q] have negative powers")
        result = LaurentPoly([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift(self, k):
        return LaurentPoly(self.coeffs, self.low + k) if self.coeffs else self

    def subs_inverse(self):
        """The Laurent polynomial obtained by q -> 1/q."""
        if not self.coeffs:
            return self
        return LaurentPoly(self.coeffs[::-1], -self.max_exp)

    def __call__(self, x):
        return IntPoly._raw(self.coeffs)(x) * Fraction(x) ** self.low

    def to_ratfunc(self):
        return RatFunc.from_laurent(self)


# --------------------------------------------------------------------------
# Rational functions


class RatFunc:
    """Canonical element of Q(q): ``scale * num / den``.

    ``num`` and ``den`` are coprime primitive integer polynomials with
    positive leading coefficients; zero is ``0 * 0 / 1``.
    """

    __slots__ = ("num", "den", "scale")

    def __init__(self, num=0, den=1, scale=1):
        if isinstance(num, (int, list, tuple)):
            num = IntPoly(num)
        if isinstance(den, (int, list, tuple)):
            den = IntPoly(den)
        scale = Fraction(scale)
        if not den:
            raise ZeroDivisionError("zero divisor")
        if not num or not scale:
            self._set(IntPoly(), IntPoly(1), Fraction(0))
            return
        cn, num = num.primitive()
        cd, den = den.primitive()
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.exact_quotient(g)
            den = den.exact_quotient(g)
        self._set(num, den, scale * Fraction(cn, cd))

    def _set(self, num, den, scale):
        self.num, self.den, self.scale = num, den, scale

    @classmethod
    def _make(cls, num, den, scale):
        r = object.__new__(cls)
        r.num, r.den, r.scale = num, den, scale
        return r

    @classmethod
    def const(cls, c):
        c = Fraction(c)
        if not c:
            return cls._make(IntPoly(), IntPoly(1), Fraction(0))
        return cls._make(IntPoly(1), IntPoly(1), c)

    @classmethod
    def q_power(cls, k, c=1):
        """The monomial c * q**k."""
        c = Fraction(c)
        if not c:
            return cls.const(0)
        if k >= 0:
            return cls._make(IntPoly.monomial(k), IntPoly(1), c)
        return cls._make(IntPoly(1), IntPoly.monomial(-k), c)

    @classmethod
    def from_laurent(cls, lp, scale=1):
        scale = Fraction(scale)
        if not lp or not scale:
            return cls.const(0)
        c, p = IntPoly._raw(lp.coeffs).primitive()
        if lp.low >= 0:
            return cls._make(p.shift(lp.low), IntPoly(1), scale * c)
        return cls._make(p, IntPoly.monomial(-lp.low), scale * c)

    @classmethod
    def from_coprime(cls, num, den, scale=1):
        """Build from a numerator/denominator pair already known to be coprime."""
        scale = Fraction(scale)
        if not num or not scale:
            return cls.const(0)
        cn, num = num.primitive()
        cd, den = den.primitive()
        return cls._make(num, den, scale * Fraction(cn, cd))

    # -- predicates -------------------------------------------------------

    def __bool__(self):
        return bool(self.scale)

    def is_zero(self):
        return not self.scale

    def is_const(self):
        return self.num.degree <= 0 and self.den.degree == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return (self.scale, self.num.coeffs, self.den.coeffs) == (
            other.scale,
            other.num.coeffs,
            other.den.coeffs,
        )

    def __hash__(self):
        return hash(("RatFunc", self.scale, self.num.coeffs, self.den.coeffs))

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if not self.scale:
            return "0"
        s = "" if self.scale == 1 else f"({self.scale})*"
        n = str(self.num)
        if self.den.degree == 0:
            return s + (f"({n})" if s and self.num.degree > 0 else n)
        return f"{s}({n})/({self.den})"

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, Fraction)):
            return RatFunc.const(x)
        if isinstance(x, LaurentPoly):
            return RatFunc.from_laurent(x)
        if isinstance(x, IntPoly):
            return RatFunc(x)
        return NotImplemented

    def __neg__(self):
        return RatFunc._make(self.num, self.den, -self.scale)

    def __add__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.scale:
            return other
        if not other.scale:
            return self
        a, b = self, other
        if a.den == b.den:
            g, da, db = a.den, IntPoly(1), IntPoly(1)
        else:
            g = poly_gcd(a.den, b.den)
            da = a.den.exact_quotient(g) if g.degree > 0 else a.den
            db = b.den.exact_quotient(g) if g.degree > 0 else b.den
        sa, sb = a.scale, b.scale
        L = sa.denominator * sb.denominator // gcd(sa.denominator, sb.denominator)
        ia = sa.numerator * (L // sa.denominator)
        ib = sb.numerator * (L // sb.denominator)
        num = a.num * db * ia + b.num * da * ib
        if not num:
            return RatFunc.const(0)
        den = a.den * db
        if g.degree > 0:
            h = poly_gcd(num, g)
            if h.degree > 0:
                num = num.exact_quotient(h)
                den = den.exact_quotient(h)
        cn, num = num.primitive()
        return RatFunc._make(num, den, Fraction(cn, L))

    __radd__ = __add__

    def __sub__(self, other):
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RatFunc.const(0)
            return RatFunc._make(self.num, self.den, self.scale * other)
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.scale or not other.scale:
            return RatFunc.const(0)
        an, ad, bn, bd = self.num, self.den, other.num, other.den
        g1 = poly_gcd(an, bd) if bd.degree > 0 and an.degree > 0 else None
        g2 = poly_gcd(bn, ad) if ad.degree > 0 and bn.degree > 0 else None
        if g1 is not None and g1.degree > 0:
            an, bd = an.exact_quotient(g1), bd.exact_quotient(g1)
        if g2 is not None and g2.degree > 0:
            bn, ad = bn.exact_quotient(g2), ad.exact_quotient(g2)
        return RatFunc._make(an * bn, ad * bd, self.scale * other.scale)

    __rmul__ = __mul__

    def inverse(self):
        if not self.scale:
            raise ZeroDivisionError("zero divisor")
        return RatFunc._make(self.den, self.num, 1 / self.scale)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("zero divisor")
            return RatFunc._make(self.num, self.den, self.scale / other)
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFunc._coerce(other) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc._make(self.num**e, self.den**e, self.scale**e)

    # -- evaluation and substitution -------------------------------------

    def __call__(self, x):
        x = Fraction(x)
        d = self.den(x)
        if not d:
            raise ZeroDivisionError("pole at evaluation point")
        return self.scale * self.num(x) / d

    def subs_inverse(self):
        """The rational function f(1/q), canonicalised."""
        if not self.scale:
            return self
        vn, vd = self.num.valuation(), self.den.valuation()
        nn = IntPoly._raw(self.num.coeffs[vn:][::-1])
        dd = IntPoly._raw(self.den.coeffs[vd:][::-1])
        e = vd - vn + dd.degree - nn.degree
        scale = self.scale
        if nn.lc < 0:
            nn, scale = -nn, -scale
        if dd.lc < 0:
            dd, scale = -dd, -scale
        if e >= 0:
            nn = nn.shift(e)
        else:
            dd = dd.shift(-e)
        return RatFunc._make(nn, dd, scale)

    def subs_power(self, k):
        """f(q**k) for a positive integer k."""
        def spread(p):
            out = [0] * (p.degree * k + 1)
            for i, c in enumerate(p.coeffs):
                out[i * k] = c
            return IntPoly._raw(out)

        return RatFunc._make(spread(self.num), spread(self.den), self.scale)

    def to_laurent(self):
        """The LaurentPoly equal to self, or ``None`` if not in Z[q, 1/q]."""
        if not self.scale:
            return LaurentPoly()
        if self.den.degree != len(self.den.coeffs) - 1 or any(self.den.coeffs[:-1]):
            return None
        if self.scale.denominator != 1:
            return None
        s = self.scale.numerator
        return LaurentPoly([c * s for c in self.num.coeffs], -self.den.degree)

    def digest(self):
        """Short stable fingerprint for reports."""
        import hashlib

        h = hashlib.sha256(repr((str(self.scale), self.num.coeffs, self.den.coeffs)).encode())
        return h.hexdigest()[:16]


# --------------------------------------------------------------------------
# Jets


def _is_zero(c):
    return not c


def _inverse(c):
    inv = getattr(c, "inverse", None)
    if inv is not None:
        return inv()
    return Fraction(1) / c


class Jet:
    """Truncated power series ``sum(a_i * eps**i) + O(eps**(order+1))``.

    Coefficients may be any exact ring elements (RatFunc, LaurentPoly,
    Fraction, int).  Binary operations between jets of different order
    truncate to the smaller order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        self.coeffs = coeffs

    @property
    def order(self):
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order):
        return cls([c] + [c * 0] * order)

    @classmethod
    def variable(cls, order, one=1):
        """The jet of eps itself."""
        zero = one * 0
        return cls([zero, one] + [zero] * (order - 1)) if order >= 1 else cls([zero])

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot extend a jet beyond its order")
        return Jet(self.coeffs[: order + 1])

    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return i
        return len(self.coeffs)

    def map(self, f):
        return Jet(f(c) for c in self.coeffs)

    def __neg__(self):
        return Jet(-c for c in self.coeffs)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet((self.coeffs[0] + other,) + self.coeffs[1:])
        n = min(len(self.coeffs), len(other.coeffs))
        return Jet(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        n = min(len(a), len(b))
        out = []
        for m in range(n):
            acc = None
            for i in range(m + 1):
                ai, bj = a[i], b[m - i]
                if _is_zero(ai) or _is_zero(bj):
                    continue
                t = ai * bj
                acc = t if acc is None else acc + t
            out.append(acc if acc is not None else a[0] * 0)
        return Jet(out)

    __rmul__ = __mul__

    def invert(self):
        a = self.coeffs
        if _is_zero(a[0]):
            raise ZeroDivisionError("pole at expansion point")
        inv0 = _inverse(a[0])
        out = [inv0]
        for m in range(1, len(a)):
            acc = None
            for i in range(1, m + 1):
                if _is_zero(a[i]):
                    continue
                t = a[i] * out[m - i]
                acc = t if acc is None else acc + t
            out.append(-(acc * inv0) if acc is not None else inv0 * 0)
        return Jet(out)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * _inverse(other)
        v = other.valuation()
        if v == 0:
            return self * other.invert()
        if v > other.order:
            raise ZeroDivisionError("pole at expansion point")
        if any(not _is_zero(c) for c in self.coeffs[:v]):
            raise ZeroDivisionError("pole at expansion point")
        # divide both by eps^v; the quotient loses v orders
        return Jet(self.coeffs[v:]) * Jet(other.coeffs[v:]).invert()

    def __rtruediv__(self, other):
        return self.invert() * other

    def __pow__(self, e):
        if e < 0:
            return self.invert() ** (-e)
        result = Jet.constant(self.coeffs[0] ** 0, self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def compose(self, inner):
        """self(inner(eps)) for an inner jet with zero constant term."""
        if not _is_zero(inner.coeffs[0]):
            raise ValueError("inner jet must vanish at the expansion point")
        n = min(self.order, inner.order)
        acc = Jet.constant(self.coeffs[n], n)
        inner = inner.truncate(n)
        for c in reversed(self.coeffs[:n]):
            acc = acc * inner + c
        return acc


def jet_of_linear_factor(c, sign, power, order):
    """Jet of ``(c + sign*eps)**power`` as an exact truncated binomial expansion."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if _is_zero(c) and power < 0:
        raise ZeroDivisionError("pole at expansion point")
    out = []
    for m in range(order + 1):
        b = _binom(power, m) * sign**m
        if not b:
            out.append(c * 0)
            continue
        e = power - m
        if _is_zero(c):
            out.append(c * 0 if e else c**0 * b)
        else:
            out.append((c**e) * b)
    return Jet(out)


# --------------------------------------------------------------------------
# membership in Z[q, 1/q], Z[1/q], Z[q]

RINGS = ("Z_q_invq", "Z_invq", "Z_q")


def laurent_membership(f, ring="Z_q_invq"):
    """Decide ``f in ring``; returns ``(flag, witness_or_None)``."""
    if ring not in RINGS:
        raise ValueError(f"unknown ring {ring!r}")
    if isinstance(f, LaurentPoly):
        lp = f
    else:
        lp = RatFunc._coerce(f).to_laurent()
    if lp is None:
        return False, None
    if lp and ring == "Z_invq" and lp.max_exp > 0:
        return False, None
    if lp and ring == "Z_q" and lp.min_exp < 0:
        return False, None
    return True, lp
