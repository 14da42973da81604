"""Partial-fraction data of the rational function behind S~_n(q) and the
resulting linear form in q-zeta values.

For even A, r >= 1 with A - 2r > 0 and n >= 0 let

    R(T) = T^E q^(-A n(n+1)/2) (q;q)_n^(A-2r)
           * (q^(-rn) T; q)_(rn) (q^(n+1) T; q)_(rn) / prod_{i=0..n} (T - q^(-i))^A

with E = (A-2r)n/2 + A/2 - 2.  Then S~_n(q) = sum_k q^k (1 - q^(2k+n)) R(q^k).
Writing R(T) = sum_{s,j} c[s,j] / (T - q^(-j))^s, the coefficients c[s,j]
come from the jet of R(T)(T - q^(-j))^A at T = q^(-j).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from qzeta.exact_algebra import IntPoly, Jet, LaurentPoly, RatFunc
from qzeta.qtoolkit import (
    CycloFraction,
    FracJet,
    divisors,
    linear_power_jet,
    q_factorial,
    stirling_unsigned,
)

__all__ = [
    "FormParams",
    "CoefficientTable",
    "LinearForm",
    "rtilde_degree",
    "rtilde_value",
    "rtilde_local_jet",
    "coefficients",
    "p_tilde_s",
    "p_tilde_s_at_1",
    "p_tilde_0_at_1",
    "p1_derivative_at_1",
    "build_linear_form",
    "ratfunc_to_json",
    "ratfunc_from_json",
]


@dataclass(frozen=True, order=True)
class FormParams:
    """Even A, r >= 1 with A - 2r > 0, and n >= 0.

    ``extended=True`` admits any even A >= 0 and r >= 0; the rational
    function R~_n and the e_j(u) of the denominator module still make sense
    there, but no linear form is attached.
    """

    A: int
    r: int
    n: int
    extended: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.A % 2:
            raise ValueError(f"A must be even, got {self.A}")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.extended:
            if self.A < 0 or self.r < 0:
                raise ValueError("A and r must be non-negative")
            return
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.A - 2 * self.r <= 0:
            raise ValueError(f"need A - 2r > 0, got A={self.A}, r={self.r}")
        if self.A < 4:
            raise ValueError("the two series of the linear form only converge together for A >= 4")
        if self.n < 0:
            raise ValueError("n must be non-negative")

    @property
    def t_exponent(self) -> int:
        """Power of T in front of R~_n(T; q)."""
        A, r, n = self.A, self.r, self.n
        twice = (A - 2 * r) * n + A - 4
        assert twice % 2 == 0
        return twice // 2

    @property
    def q_prefactor(self) -> int:
        A, n = self.A, self.n
        assert (A * n * (n + 1)) % 2 == 0
        return -(A * n * (n + 1)) // 2


def rtilde_degree(params: FormParams) -> int:
    """Degree in T of R~_n(T; q) read off its factors."""
    A, r, n = params.A, params.r, params.n
    return params.t_exponent + 2 * r * n - A * (n + 1)


def rtilde_value(params: FormParams, T, q):
    """R~_n(T; q) at rational T, q (direct product; used as an oracle)."""
    A, r, n = params.A, params.r, params.n
    T, q = Fraction(T), Fraction(q)
    val = T ** params.t_exponent * q ** params.q_prefactor
    qn = Fraction(1)
    for i in range(1, n + 1):
        qn *= 1 - q**i
    val *= qn ** (A - 2 * r)
    for i in range(r * n):
        val *= (1 - q ** (-r * n + i) * T) * (1 - q ** (n + 1 + i) * T)
    for i in range(n + 1):
        val /= (T - q ** (-i)) ** A
    return val


def _numerator_jet(params: FormParams, j: int, order: int) -> Jet:
    """Laurent jet of the polynomial part: monomials and the two Pochhammer products."""
    A, r, n = params.A, params.r, params.n
    one = LaurentPoly([1])
    const = LaurentPoly.from_intpoly(q_factorial(n) ** (A - 2 * r), params.q_prefactor)
    acc = linear_power_jet(LaurentPoly.monomial(-j), {}, one, params.t_exponent, order).jet
    acc = acc * const
    zero = LaurentPoly()
    pad = [zero] * (order - 1)
    for i in range(r * n):
        for e in (-r * n + i, n + 1 + i):
            # 1 - q^e T = (1 - q^(e-j)) - q^e eps
            c0 = (LaurentPoly([1]) - LaurentPoly.monomial(e - j))
            acc = acc * Jet([c0, LaurentPoly.monomial(e, -1)] + pad) if order else acc * c0
    return acc


def _rtilde_fracjet(params: FormParams, j: int, order: int) -> FracJet:
    A, n = params.A, params.n
    if not 0 <= j <= n:
        raise ValueError(f"j must lie in 0..{n}")
    out = FracJet.from_jet(_numerator_jet(params, j, order))
    one = LaurentPoly([1])
    for i in range(n + 1):
        if i == j:
            continue
        # T - q^-i = delta + eps with delta = q^-j - q^-i
        if i > j:
            unit, cden = LaurentPoly.monomial(-i), {t: 1 for t in divisors(i - j)}
        else:
            unit, cden = LaurentPoly.monomial(-j, -1), {t: 1 for t in divisors(j - i)}
        out = out * linear_power_jet(unit, cden, one, -A, order)
    return out


def rtilde_local_jet(params: FormParams, j: int, order: int) -> Jet:
    """Jet in eps = T - q^(-j) of R~_n(T; q)(T - q^(-j))^A, RatFunc coefficients."""
    fj = _rtilde_fracjet(params, j, order)
    return Jet(fj.coefficient(i).to_ratfunc() for i in range(order + 1))


# --------------------------------------------------------------------------


@dataclass
class CoefficientTable:
    params: FormParams
    c_tilde: dict = field(repr=False)
    fractions: dict = field(repr=False)

    def d_tilde(self, s: int, j: int) -> RatFunc:
        return self.c_tilde[s, j] * RatFunc.q_power(j * s, (-1) ** s)


def _column(args):
    params, j = args
    A = params.A
    fj = _rtilde_fracjet(params, j, A - 1)
    return j, {s: fj.coefficient(A - s) for s in range(1, A + 1)}


def coefficients(params: FormParams, jobs: int = 1) -> CoefficientTable:
    """All c~[s, j] for s = 1..A and j = 0..n."""
    work = [(params, j) for j in range(params.n + 1)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            cols = list(ex.map(_column, work))
    else:
        cols = [_column(w) for w in work]
    fracs, table = {}, {}
    for j, col in sorted(cols, key=lambda c: c[0]):
        for s, cf in col.items():
            fracs[s, j] = cf
            table[s, j] = cf.to_ratfunc()
    return CoefficientTable(params, table, fracs)


def p_tilde_s(table: CoefficientTable, s: int) -> list:
    """Coefficients (in z^0..z^n) of P~_s(z, q) as RatFunc values."""
    A, n = table.params.A, table.params.n
    if not 1 <= s <= A:
        raise ValueError(f"s must lie in 1..{A}")
    sign = (-1) ** s
    return [table.c_tilde[s, j] * RatFunc.q_power(j * (s - 1), sign) for j in range(n + 1)]


def _p_tilde_s_frac(table: CoefficientTable, s: int) -> CycloFraction:
    sign = (-1) ** s
    acc = CycloFraction()
    for j in range(table.params.n + 1):
        acc = acc + table.fractions[s, j].shift(j * (s - 1)) * sign
    return acc


def p_tilde_s_at_1(table: CoefficientTable, s: int) -> RatFunc:
    return _p_tilde_s_frac(table, s).to_ratfunc()


def _p_tilde_0_frac(table: CoefficientTable) -> CycloFraction:
    A, n = table.params.A, table.params.n
    acc = CycloFraction()
    for s in range(1, A + 1):
        sign = (-1) ** s
        # tail[k] = sum_{j >= k} q^(j(s-1)) c~[s, j]
        tail = CycloFraction()
        for k in range(n, 0, -1):
            tail = tail + table.fractions[s, k].shift(k * (s - 1))
            weight = CycloFraction.inverse_one_minus_qpow(k, s).shift(k)
            acc = acc + weight * tail * sign
    return acc


def p_tilde_0_at_1(table: CoefficientTable, base: str = "q") -> RatFunc:
    """P~_0,n(1, q) or, with ``base='1/q'``, the same function at 1/q."""
    if base not in ("q", "1/q"):
        raise ValueError("base must be 'q' or '1/q'")
    frac = _p_tilde_0_frac(table)
    if base == "1/q":
        frac = frac.subs_inverse()
    return frac.to_ratfunc()


def p1_derivative_at_1(table: CoefficientTable) -> RatFunc:
    """d/dz P~_1(z, q) at z = 1, i.e. -sum_j j c~[1, j]."""
    acc = CycloFraction()
    for j in range(1, table.params.n + 1):
        acc = acc + table.fractions[1, j] * (-j)
    return acc.to_ratfunc()


@dataclass
class LinearForm:
    params: FormParams
    p_hat_0: RatFunc
    p_hat_odd: dict
    parts: dict = field(default_factory=dict, repr=False)

    def coefficient(self, j: int) -> RatFunc:
        return self.p_hat_0 if j == 0 else self.p_hat_odd[j]

    def to_json(self) -> dict:
        return {
            "A": self.params.A,
            "r": self.params.r,
            "n": self.params.n,
            "p_hat_0": ratfunc_to_json(self.p_hat_0),
            "p_hat_odd": {str(j): ratfunc_to_json(v) for j, v in sorted(self.p_hat_odd.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinearForm":
        params = FormParams(data["A"], data["r"], data["n"])
        return cls(
            params,
            ratfunc_from_json(data["p_hat_0"]),
            {int(j): ratfunc_from_json(v) for j, v in data["p_hat_odd"].items()},
        )


def build_linear_form(params: FormParams, table: CoefficientTable | None = None, jobs: int = 1) -> LinearForm:
    if table is None:
        table = coefficients(params, jobs=jobs)
    A, r, n = params.A, params.r, params.n
    p0 = _p_tilde_0_frac(table)
    # The finite part of sum_k q^k R(q^k) z^-k is minus the triple sum above,
    # so the constant term subtracts both copies of it.
    correction = p0.subs_inverse().shift(-n * (r - 1)) - p0
    deriv = CycloFraction()
    for j in range(1, n + 1):
        deriv = deriv + table.fractions[1, j] * (-j)
    p_hat_0 = (correction - deriv).to_ratfunc()

    ps = {s: _p_tilde_s_frac(table, s) for s in range(1, A + 1)}
    p_hat = {}
    for j in range(3, A, 2):
        acc = CycloFraction()
        for s in range(j, A + 1):
            w = Fraction(2 * stirling_unsigned(s - 1, j - 1), factorial(s - 1))
            acc = acc + ps[s] * w
        p_hat[j] = acc.to_ratfunc()
    parts = {
        "p_tilde_0_q": p0.to_ratfunc(),
        "p_tilde_0_inv": p0.subs_inverse().to_ratfunc(),
        "p1_derivative": deriv.to_ratfunc(),
        "p_tilde_s": {s: v.to_ratfunc() for s, v in ps.items()},
    }
    return LinearForm(params, p_hat_0, p_hat, parts)


# --------------------------------------------------------------------------
# JSON: exponent -> decimal-string coefficient maps


def _poly_json(p: IntPoly) -> dict:
    return {str(e): str(c) for e, c in enumerate(p.coeffs) if c}


def _poly_from(d: dict) -> IntPoly:
    if not d:
        return IntPoly()
    deg = max(int(e) for e in d)
    coeffs = [0] * (deg + 1)
    for e, c in d.items():
        coeffs[int(e)] = int(c)
    return IntPoly(coeffs)


def ratfunc_to_json(f: RatFunc) -> dict:
    return {"scale": str(f.scale), "num": _poly_json(f.num), "den": _poly_json(f.den)}


def ratfunc_from_json(d: dict) -> RatFunc:
    return RatFunc(_poly_from(d["num"]), _poly_from(d["den"]), Fraction(d["scale"]))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
