"""Common denominators of the linear form and the identities that control them.

Contents, roughly in order of use:

* ``build_D`` / ``verify_denominator_theorem``: the denominators
  (A-1)! q^floor(alpha n^2 + beta n + gamma) d_n(1/q)^power and exact
  membership of their products with the coefficients in Z[1/q].
* ``e_j_jet``, ``v_k``, ``sufficient_condition_sum``: jets in u - 1 of the
  functions e_j(u) = q^-j R~_n(q^-j u) (u - 1)^A and their combinations.
* ``closed_form_identities``: four explicit evaluations of
  sum_{j>=k} (1 - q^(n-2j)) e_j(1) and their q -> 1 shadows.
* ``andrews_transform`` and ``watson_transform``: a very-well-poised
  single sum against a multiple sum, checked in exact arithmetic.
* ``building_block_membership``: integrality of u-derivatives of the three
  q-factorial blocks R0, R1, R2.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial

from qzeta.exact_algebra import Jet, LaurentPoly, RatFunc, laurent_membership
from qzeta.linear_forms import (
    FormParams,
    LinearForm,
    _rtilde_fracjet,
    coefficients,
    p_tilde_0_at_1,
)
from qzeta.qtoolkit import (
    CycloFraction,
    FracJet,
    cyclotomic_ord,
    d_n,
    d_n_inverse,
    divisors,
    pochhammer_poly,
    q_binomial,
    q_multinomial,
    u_pochhammer_jet,
    u_power_jet,
)

__all__ = [
    "DenominatorSpec",
    "build_D",
    "verify_denominator_theorem",
    "weakened_denominator_sweep",
    "EjFactorization",
    "e_j_jet",
    "e_j_jet_from_rtilde",
    "v_k",
    "v_k_refined_membership",
    "v_k_assembly_check",
    "sufficient_condition_sum",
    "sufficient_condition_membership",
    "CLOSED_FORM_CASES",
    "closed_form_identities",
    "closed_form_report",
    "AndrewsInstance",
    "andrews_lhs",
    "andrews_rhs",
    "andrews_transform",
    "watson_transform",
    "random_andrews_instance",
    "random_rational",
    "andrews_applied_sum",
    "andrews_applied_check",
    "building_block_jet",
    "building_block_membership",
    "building_block_grid",
    "r1_valuation_certificate",
]


# --------------------------------------------------------------------------
# D_n(q)


@dataclass(frozen=True)
class DenominatorSpec:
    A: int
    r: int
    alpha: Fraction
    beta_prime: Fraction
    gamma_prime: Fraction
    beta: Fraction
    gamma: Fraction
    d_power: int
    factorial_factor: bool = True

    @classmethod
    def standard(cls, A: int, r: int, reduced: bool = False, d_power: int | None = None):
        alpha = Fraction(-A, 8) - Fraction(r * r, 2)
        beta_prime = Fraction(r - 1, 2)
        gamma_prime = Fraction(-1, 2 * A)
        if d_power is None:
            d_power = A - 1 if reduced else A
        return cls(
            A,
            r,
            alpha,
            beta_prime,
            gamma_prime,
            beta_prime - A + 1,
            gamma_prime + A - 2,
            d_power,
        )

    def exponent(self, n: int) -> int:
        return math.floor(self.alpha * n * n + self.beta * n + self.gamma)

    def multiplier(self, n: int, d_power: int | None = None, factorial_factor: bool | None = None):
        """(A-1)! q^floor(...) d_n(1/q)^power as ``(int, LaurentPoly)``."""
        power = self.d_power if d_power is None else d_power
        fac = self.factorial_factor if factorial_factor is None else factorial_factor
        lp = d_n_inverse(n) ** power if power > 0 else LaurentPoly([1])
        return (factorial(self.A - 1) if fac else 1), lp.shift(self.exponent(n))


def build_D(params: FormParams, reduced: bool = False):
    spec = DenominatorSpec.standard(params.A, params.r, reduced)
    c, lp = spec.multiplier(params.n)
    return spec, RatFunc.from_laurent(lp) * c


def _record(claim, params, passed, value, **extra):
    rec = {"claim": claim, "A": params.A, "r": params.r, "n": params.n}
    rec.update(extra)
    rec["pass"] = bool(passed)
    rec["digest"] = value.digest() if isinstance(value, RatFunc) else RatFunc.from_laurent(value).digest()
    return rec


def _times(f: RatFunc, c: int, lp: LaurentPoly) -> RatFunc:
    return f * RatFunc.from_laurent(lp) * c


def verify_denominator_theorem(form: LinearForm, spec: DenominatorSpec, extras: bool = True) -> dict:
    """Membership report for the constant term and each odd-index coefficient."""
    p = form.params
    n = p.n
    records = []
    c, lp = spec.multiplier(n)
    val = _times(form.p_hat_0, c, lp)
    ok, _ = laurent_membership(val, "Z_invq")
    records.append(_record("p_hat_0", p, ok, val, d_power=spec.d_power, factorial=spec.factorial_factor))
    for j in sorted(form.p_hat_odd):
        c, lp = spec.multiplier(n, d_power=p.A - j, factorial_factor=True)
        val = _times(form.p_hat_odd[j], c, lp)
        ok, _ = laurent_membership(val, "Z_invq")
        records.append(_record("p_hat_j", p, ok, val, j=j, d_power=p.A - j, factorial=True))
    informational = []
    if extras:
        # factorial-free form of the constant-term claim
        c, lp = spec.multiplier(n, d_power=p.A - 1, factorial_factor=False)
        val = _times(form.p_hat_0, c, lp)
        ok, _ = laurent_membership(val, "Z_invq")
        informational.append(_record("p_hat_0_without_factorial", p, ok, val, d_power=p.A - 1))
        # stronger power A - j - 1 for the odd coefficients (experimental)
        for j in sorted(form.p_hat_odd):
            c, lp = spec.multiplier(n, d_power=p.A - j - 1, factorial_factor=True)
            val = _times(form.p_hat_odd[j], c, lp)
            ok, _ = laurent_membership(val, "Z_invq")
            informational.append(_record("p_hat_j_power_A_minus_j_minus_1", p, ok, val, j=j))
    records.sort(key=lambda r: (r["claim"], r.get("j", 0)))
    return {
        "params": {"A": p.A, "r": p.r, "n": n},
        "exponent": spec.exponent(n),
        "records": records,
        "informational": informational,
        "pass": all(r["pass"] for r in records),
    }


def weakened_denominator_sweep(forms, d_power_drop: int = 2) -> list:
    """Membership of the constant term with d_n(1/q)^(A - d_power_drop).

    Documents how sharp the exponent is; callers record, never assert.
    """
    out = []
    for form in sorted(forms, key=lambda f: (f.params.A, f.params.r, f.params.n)):
        p = form.params
        spec = DenominatorSpec.standard(p.A, p.r, d_power=p.A - d_power_drop)
        c, lp = spec.multiplier(p.n)
        val = _times(form.p_hat_0, c, lp)
        ok, _ = laurent_membership(val, "Z_invq")
        out.append(_record("p_hat_0_weakened", p, ok, val, d_power=spec.d_power))
    return out


# --------------------------------------------------------------------------
# e_j(u) as jets in eps = u - 1


def _qfact_power(n: int, power: int) -> CycloFraction:
    """(q; q)_n ** power as a cyclotomic fraction."""
    if power >= 0:
        return CycloFraction(pochhammer_poly(1, n) ** power)
    den = {}
    for i in range(1, n + 1):
        for t in divisors(i):
            den[t] = den.get(t, 0) - power
    # (q)_n = (-1)^n prod phi
    return CycloFraction(LaurentPoly([(-1) ** ((n * -power) % 2)]), den)


@dataclass(frozen=True)
class EjFactorization:
    """Factored form of e_j(u).

    e_j(u) = sign * u^u_power * q^q_power * (q;q)_n^qn_power
             * prod (q^a u^u_exp; q)_length ^ power   over ``factors``.
    """

    params: FormParams
    j: int
    sign: int
    u_power: int
    q_power: int
    qn_power: int
    factors: tuple

    @classmethod
    def of(cls, params: FormParams, j: int) -> "EjFactorization":
        A, r, n = params.A, params.r, params.n
        if not 0 <= j <= n:
            raise ValueError(f"j must lie in 0..{n}")
        rn = r * n
        twice_u = A - 4 + (n - 2 * j) * A
        assert twice_u % 2 == 0 and (j * (n - j) * A) % 2 == 0
        q_power = -(rn * (rn + 1)) // 2 - (j * (n - j) * A) // 2 + j
        # ((q)_rn / (q)_n^r)^2 (q)_n^A / (q)_rn^2 = (q)_n^(A - 2r)
        factors = (
            (1, j, -1, -A),
            (1, n - j, 1, -A),
            (j + 1, rn, -1, 1),
            (n + 1 - j, rn, 1, 1),
        )
        return cls(params, j, (-1) ** rn, twice_u // 2, q_power, A - 2 * r, factors)

    def fracjet(self, order: int) -> FracJet:
        out = FracJet.from_jet(u_power_jet(self.u_power, order))
        const = _qfact_power(self.params.n, self.qn_power).shift(self.q_power) * self.sign
        out = out * const
        for a, length, u_exp, power in self.factors:
            if length and power:
                out = out * u_pochhammer_jet(a, length, u_exp, order, power)
        return out


@lru_cache(maxsize=512)
def _e_j_fracjet(params: FormParams, j: int, order: int) -> FracJet:
    return EjFactorization.of(params, j).fracjet(order)


def _to_ratjet(fj: FracJet) -> Jet:
    return Jet(fj.coefficient(i).to_ratfunc() for i in range(fj.order + 1))


def e_j_jet(params: FormParams, j: int, order: int) -> Jet:
    """Jet of e_j(u) at u = 1 from its factored closed form."""
    return _to_ratjet(_e_j_fracjet(params, j, order))


def e_j_jet_from_rtilde(params: FormParams, j: int, order: int) -> Jet:
    """Jet of q^-j R~_n(q^-j u)(u - 1)^A, built from the T-expansion at q^-j."""
    A = params.A
    fj = _rtilde_fracjet(params, j, order)
    # T - q^-j = q^-j (u - 1), so the m-th coefficient picks up q^(-j m)
    coeffs = [fj.jet[m].shift(-j + j * A - j * m) for m in range(order + 1)]
    return _to_ratjet(FracJet(Jet(coeffs), fj.den, fj.scale))


def e_j_reflection_check(params: FormParams, j: int, order: int) -> bool:
    """e_{n-j}(u) = u^(A-4) q^(n-2j) e_j(1/u) as an identity of jets."""
    A, n = params.A, params.n
    lhs = _e_j_fracjet(params, n - j, order)
    base = _e_j_fracjet(params, j, order)
    inner = Jet([LaurentPoly()] + [LaurentPoly([(-1) ** m]) for m in range(1, order + 1)])
    composed = FracJet(base.jet.compose(inner), base.den, base.scale)
    rhs = composed * u_power_jet(A - 4, order) * LaurentPoly.monomial(n - 2 * j)
    diff = lhs - rhs
    return all(not diff.coefficient(i) for i in range(order + 1))


def _sum_fracjets(items):
    acc = None
    for x in items:
        acc = x if acc is None else acc + x
    return acc


def _v_k_frac(params: FormParams, s: int, k: int) -> CycloFraction:
    A, n = params.A, params.n
    if not 1 <= s <= A:
        raise ValueError(f"s must lie in 1..{A}")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    order = A - s
    terms = []
    for j in range(k, n + 1):
        terms.append(_e_j_fracjet(params, j, A - 1).truncate(order) * LaurentPoly.monomial(-k * (s - 1)))
        terms.append(_e_j_fracjet(params, n - j, A - 1).truncate(order) * LaurentPoly.monomial(-k, -((-1) ** s)))
    return _sum_fracjets(terms).coefficient(order)


def v_k(params: FormParams, s: int, k: int) -> RatFunc:
    return _v_k_frac(params, s, k).to_ratfunc()


def v_k_refined_membership(params: FormParams, s: int, k: int) -> bool:
    """V_k d_n(1/q)^(A-s) / (1 - q^-k) in Z[q, 1/q]."""
    cf = _v_k_frac(params, s, k) * (d_n_inverse(params.n) ** (params.A - s))
    cf = cf * CycloFraction.inverse_one_minus_qpow(-k)
    return laurent_membership(cf.to_ratfunc(), "Z_q_invq")[0]


def v_k_plain_membership(params: FormParams, s: int, k: int) -> bool:
    cf = _v_k_frac(params, s, k) * (d_n_inverse(params.n) ** (params.A - s))
    return laurent_membership(cf.to_ratfunc(), "Z_q_invq")[0]


def v_k_assembly_check(params: FormParams, table=None) -> dict:
    """Compare sum_s sum_k V_k / (1 - q^-k)^s with P~_0(1,q) - q^-n(r-1) P~_0(1,1/q)."""
    A, r, n = params.A, params.r, params.n
    if table is None:
        table = coefficients(params)
    acc = CycloFraction()
    for s in range(1, A + 1):
        for k in range(1, n + 1):
            acc = acc + _v_k_frac(params, s, k) * CycloFraction.inverse_one_minus_qpow(-k, s)
    lhs = acc.to_ratfunc()
    rhs = p_tilde_0_at_1(table, "q") - p_tilde_0_at_1(table, "1/q") * RatFunc.q_power(-n * (r - 1))
    return {"vk_side": lhs, "p_tilde_side": rhs, "equal": lhs == rhs, "equal_up_to_sign": lhs == rhs or lhs == -rhs}


@lru_cache(maxsize=256)
def _sufficient_fracjet(params: FormParams, k: int, order: int) -> FracJet:
    n = params.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    terms = []
    for j in range(k, n + 1):
        e = n - 2 * j
        # 1 - q^e u^2 at u = 1 + eps
        factor = Jet(
            [(LaurentPoly([1]) - LaurentPoly.monomial(e)), LaurentPoly.monomial(e, -2), LaurentPoly.monomial(e, -1)]
            + [LaurentPoly()] * max(0, order - 2)
        ).truncate(order)
        terms.append(_e_j_fracjet(params, j, order) * factor)
    return _sum_fracjets(terms)


def sufficient_condition_sum(params: FormParams, l: int, k: int) -> RatFunc:
    """l-th Taylor coefficient at u = 1 of sum_{j=k..n} e_j(u)(1 - q^(n-2j) u^2)."""
    if l < 0:
        raise ValueError("l must be non-negative")
    return _sufficient_fracjet(params, k, max(l, 2)).coefficient(l).to_ratfunc()


def sufficient_condition_membership(params: FormParams, l: int, k: int) -> bool:
    cf = _sufficient_fracjet(params, k, max(l, 2)).coefficient(l)
    cf = cf * (d_n_inverse(params.n) ** l) * CycloFraction.inverse_one_minus_qpow(-k)
    return laurent_membership(cf.to_ratfunc(), "Z_q_invq")[0]


# --------------------------------------------------------------------------
# the four closed forms at u = 1

CLOSED_FORM_CASES = ((0, 0), (2, 0), (0, 1), (2, 1))


def _lp(p) -> LaurentPoly:
    return LaurentPoly.from_intpoly(p)


def _qb(n, k, inverse=False) -> LaurentPoly:
    lp = _lp(q_binomial(n, k))
    return lp.subs_inverse() if inverse else lp


def _closed_form_sides(case, n, k):
    one_minus = lambda e: (LaurentPoly([1]) - LaurentPoly.monomial(e))  # noqa: E731
    lhs = LaurentPoly()
    if case == (0, 0):
        for j in range(k, n + 1):
            lhs = lhs + one_minus(n - 2 * j) * LaurentPoly.monomial(j)
        # p^-n (1 - p^(n-k+1)) / (1 - p) = sum_{i<=n-k} q^(n-i)
        rhs = one_minus(-k) * LaurentPoly.from_dict({n - i: 1 for i in range(n - k + 1)})
        return lhs, rhs
    if case == (2, 0):
        for j in range(k, n + 1):
            lhs = lhs + one_minus(n - 2 * j) * LaurentPoly.monomial(j * (j - n + 1)) * _qb(n, j) ** 2
        rhs = one_minus(-k) * LaurentPoly.monomial(k * (n - k + 1)) * _qb(n, k, True) * _qb(n - 1, k - 1, True)
        return lhs, rhs
    if case == (0, 1):
        half = n * (n + 1) // 2
        for j in range(k, n + 1):
            lhs = lhs + one_minus(n - 2 * j) * LaurentPoly.monomial(j - half) * _qb(n + j, n) * _qb(2 * n - j, n)
        rhs = one_minus(-k) * LaurentPoly.monomial(half) * _qb(n + k, n, True) * _qb(2 * n + 1 - k, n + 1, True)
        return lhs, rhs
    if case == (2, 1):
        half = n * (n + 1) // 2
        for j in range(k, n + 1):
            lhs = lhs + (
                one_minus(n - 2 * j)
                * LaurentPoly.monomial(j * j + j - n * j - half)
                * _qb(n + j, n)
                * _qb(2 * n - j, n)
                * _qb(n, j) ** 2
            )
        inner = LaurentPoly()
        for l in range(n - k + 1):
            multi = _lp(q_multinomial(2 * n - k - l, [k, n - k])).subs_inverse()
            term = LaurentPoly.monomial(-(l * (2 * k + l - 1) // 2), (-1) ** l)
            inner = inner + term * _qb(n + k, k + l, True) * _qb(n - l - 1, k - 1, True) * multi
        e = k * k - k * n - k - n * (n - 1) // 2
        rhs = one_minus(-k) * LaurentPoly.monomial(-e) * inner
        return lhs, rhs
    raise ValueError(f"unknown case {case!r}")


def _integer_limit_sides(case, n, k):
    C = comb
    lhs = 0
    for j in range(k, n + 1):
        w = {
            (0, 0): 1,
            (2, 0): C(n, j) ** 2,
            (0, 1): C(n + j, n) * C(2 * n - j, n),
            (2, 1): C(n + j, n) * C(2 * n - j, n) * C(n, j) ** 2,
        }[case]
        lhs -= (n - 2 * j) * w
    if case == (0, 0):
        rhs = k * (n - k + 1)
    elif case == (2, 0):
        rhs = k * C(n, k) * C(n - 1, k - 1)
    elif case == (0, 1):
        rhs = k * C(n + k, k) * C(2 * n + 1 - k, n + 1)
    else:
        rhs = 0
        for l in range(n - k + 1):
            multi = factorial(2 * n - k - l) // (factorial(k) * factorial(n - k) * factorial(n - k - l))
            rhs += (-1) ** l * C(n + k, k + l) * C(n - l - 1, k - 1) * multi
        rhs *= k
    return lhs, rhs


def _limit_at_one(lp: LaurentPoly) -> Fraction:
    """Value at q = 1 of lp / (-(1 - q)), after exact cancellation."""
    f = RatFunc.from_laurent(lp) / RatFunc([-1, 1])
    return f(1)


def closed_form_identities(case, n: int, k: int) -> bool:
    """True iff the identity, its link to e_j(1) and its q -> 1 limit all hold."""
    return closed_form_report(case, n, k)["pass"]


def closed_form_report(case, n: int, k: int) -> dict:
    """Exact check of one closed form, its link to e_j(1) and its q -> 1 limit."""
    case = tuple(case)
    if case not in CLOSED_FORM_CASES:
        raise ValueError(f"case must be one of {CLOSED_FORM_CASES}")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    lhs, rhs = _closed_form_sides(case, n, k)
    params = FormParams(case[0], case[1], n, extended=True)
    via_e = CycloFraction()
    for j in range(k, n + 1):
        e1 = _e_j_fracjet(params, j, 0).coefficient(0)
        via_e = via_e + e1 * (LaurentPoly([1]) - LaurentPoly.monomial(n - 2 * j))
    via_e = via_e.to_ratfunc()
    lhs_rf = RatFunc.from_laurent(lhs)
    if via_e == lhs_rf:
        link_sign = 1
    elif via_e == -lhs_rf:
        link_sign = -1
    else:
        link_sign = 0
    int_lhs, int_rhs = _integer_limit_sides(case, n, k)
    lim_lhs = _limit_at_one(lhs)
    lim_rhs = _limit_at_one(rhs)
    return {
        "case": case,
        "n": n,
        "k": k,
        "equal": lhs == rhs,
        "link_sign": link_sign,
        "limit_lhs": lim_lhs,
        "limit_rhs": lim_rhs,
        "integer_lhs": int_lhs,
        "integer_rhs": int_rhs,
        "limit_equal": lim_lhs == int_lhs and lim_rhs == int_rhs and int_lhs == int_rhs,
        "rhs_divisible": laurent_membership(
            RatFunc.from_laurent(rhs) / RatFunc.from_laurent(LaurentPoly([1]) - LaurentPoly.monomial(-k)),
            "Z_q_invq",
        )[0],
        "pass": lhs == rhs and link_sign != 0 and lim_lhs == int_lhs and lim_rhs == int_rhs and int_lhs == int_rhs,
    }


# --------------------------------------------------------------------------
# Andrews' transformation and Watson's finite transformation


@dataclass
class AndrewsInstance:
    m: int
    N: int
    a: object
    bs: list
    cs: list
    base: object
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 0 or self.N < 0:
            raise ValueError("m and N must be non-negative")
        if len(self.bs) != self.m + 1 or len(self.cs) != self.m + 1:
            raise ValueError("need m + 1 parameters b_i and c_i")


def _one_like(x):
    if isinstance(x, Jet):
        return x.coeffs[0] ** 0
    if isinstance(x, RatFunc):
        return RatFunc.const(1)
    return Fraction(1)


def _poch_list(x, N, base, one):
    out = [one]
    acc = one
    bpow = one
    for _ in range(N):
        acc = acc * (one - x * bpow)
        bpow = bpow * base
        out.append(acc)
    return out


def _is_zero_value(x):
    if isinstance(x, Jet):
        return not x.coeffs[0]
    return not x


def _divide(num, den):
    if isinstance(den, Jet) or isinstance(num, Jet):
        if not isinstance(den, Jet):
            return num * (1 / den if not isinstance(den, RatFunc) else den.inverse())
        try:
            return num / den
        except ZeroDivisionError:
            raise ValueError("degenerate parameterization") from None
    if _is_zero_value(den):
        raise ValueError("degenerate parameterization")
    return num / den


def _truncate_like(x, order):
    return x.truncate(min(order, x.order)) if isinstance(x, Jet) and order is not None else x


def andrews_lhs(inst: AndrewsInstance, premultiplier=None, order=None):
    """Very-well-poised single sum over k = 0..N.

    ``premultiplier`` is multiplied into each numerator before the division,
    which lets a factor cancel a pole of the summand at a jet's base point.
    """
    a, q, N, m = inst.a, inst.base, inst.N, inst.m
    one = _one_like(a)
    pre = one if premultiplier is None else premultiplier
    params = list(zip(inst.bs, inst.cs))
    z = a ** (m + 1) * q ** (m + 1 + N)
    for b, c in params:
        z = _divide(z, b * c)
    qN = one
    for _ in range(N):
        qN = _divide(qN, q)
    total = None
    aq = a * q
    num_lists = [_poch_list(x, N, q, one) for b, c in params for x in (b, c)] + [_poch_list(qN, N, q, one)]
    den_lists = [_poch_list(q, N, q, one)]
    for b, c in params:
        den_lists.append(_poch_list(_divide(aq, b), N, q, one))
        den_lists.append(_poch_list(_divide(aq, c), N, q, one))
    den_lists.append(_poch_list(a * q ** (N + 1), N, q, one))
    aq_list = _poch_list(aq, N, q, one)
    zpow = one
    for k in range(N + 1):
        if k == 0:
            num = pre * one
        else:
            # (1 - a q^2k)/(1 - a) * (a)_k = (1 - a q^2k) (aq)_(k-1)
            num = pre * (one - a * q ** (2 * k)) * aq_list[k - 1]
        for lst in num_lists:
            num = num * lst[k]
        num = num * zpow
        den = one
        for lst in den_lists:
            den = den * lst[k]
        term = _truncate_like(_divide(num, den), order)
        total = term if total is None else total + term
        zpow = zpow * z
    return total


def andrews_rhs(inst: AndrewsInstance, premultiplier=None, order=None):
    """Prefactor times the multiple sum over 0 <= l_1 <= ... <= l_m <= N."""
    a, q, N, m = inst.a, inst.base, inst.N, inst.m
    one = _one_like(a)
    pre = one if premultiplier is None else premultiplier
    bs, cs = inst.bs, inst.cs
    aq = a * q
    qN = one
    for _ in range(N):
        qN = _divide(qN, q)
    bl, cl = bs[m], cs[m]
    pf_num = pre * _poch_list(aq, N, q, one)[N] * _poch_list(_divide(aq, bl * cl), N, q, one)[N]
    pf_den = _poch_list(_divide(aq, bl), N, q, one)[N] * _poch_list(_divide(aq, cl), N, q, one)[N]
    if m == 0:
        return _truncate_like(_divide(pf_num, pf_den), order)
    P = lambda x: _poch_list(x, N, q, one)  # noqa: E731
    up_b = [P(bs[i + 1]) for i in range(m)]
    up_c = [P(cs[i + 1]) for i in range(m)]
    dn_b = [P(_divide(aq, bs[i])) for i in range(m)]
    dn_c = [P(_divide(aq, cs[i])) for i in range(m)]
    diff_num = [P(_divide(aq, bs[i] * cs[i])) for i in range(m)]
    qq = P(q)
    top_num = P(qN)
    top_den = P(_divide(bl * cl * qN, a))
    weights = [_divide(a, bs[i + 1] * cs[i + 1]) for i in range(m - 1)]
    total = None
    for ls in combinations_with_replacement(range(N + 1), m):
        num = one
        den = one
        prev = 0
        for i, li in enumerate(ls):
            num = num * up_b[i][li] * up_c[i][li] * diff_num[i][li - prev]
            den = den * dn_b[i][li] * dn_c[i][li] * qq[li - prev]
            prev = li
        for i in range(m - 1):
            num = num * weights[i] ** ls[i]
        num = num * q ** sum(ls) * top_num[ls[-1]]
        den = den * top_den[ls[-1]]
        term = _divide(num, den)
        total = term if total is None else total + term
    return _truncate_like(_divide(pf_num * total, pf_den), order)


def _values_equal(x, y):
    if isinstance(x, Jet) and isinstance(y, Jet):
        k = min(x.order, y.order)
        return x.truncate(k) == y.truncate(k)
    return x == y


def andrews_transform(inst: AndrewsInstance):
    lhs = andrews_lhs(inst)
    rhs = andrews_rhs(inst)
    return lhs, rhs, _values_equal(lhs, rhs)


def _phi(upper, lower, q, z, terms):
    """Terminating basic hypergeometric sum r+1 phi r over 0..terms."""
    total = Fraction(0)
    term = Fraction(1)
    for k in range(terms + 1):
        total += term
        if k == terms:
            break
        ratio = z
        for x in upper:
            ratio *= 1 - x * q**k
        den = 1 - q ** (k + 1)
        for x in lower:
            den *= 1 - x * q**k
        if not den:
            raise ValueError("degenerate parameterization")
        ratio /= den
        term *= ratio
    return total


def watson_transform(t: Fraction, b, c, d, e, N: int, q: Fraction):
    """Watson's finite 8phi7 -> 4phi3 transformation with a = t^2.

    Written directly from the classical statement (square roots of a
    appear as the pair q t, -q t over t, -t); serves as an independent
    route for the m = 1 case of :func:`andrews_transform`.
    """
    t, b, c, d, e, q = map(Fraction, (t, b, c, d, e, q))
    a = t * t
    if not t or 0 in (b, c, d, e):
        raise ValueError("degenerate parameterization")
    qN = q ** (-N)
    upper = [a, q * t, -q * t, b, c, d, e, qN]
    lower = [t, -t, a * q / b, a * q / c, a * q / d, a * q / e, a * q ** (N + 1)]
    z = a * a * q ** (2 + N) / (b * c * d * e)
    lhs = _phi(upper, lower, q, z, N)
    pre = Fraction(1)
    for i in range(N):
        den = (1 - a * q ** (1 + i) / d) * (1 - a * q ** (1 + i) / e)
        if not den:
            raise ValueError("degenerate parameterization")
        pre *= (1 - a * q ** (1 + i)) * (1 - a * q ** (1 + i) / (d * e)) / den
    rhs = pre * _phi([a * q / (b * c), d, e, qN], [a * q / b, a * q / c, d * e * qN / a], q, q, N)
    return lhs, rhs, lhs == rhs


def random_rational(rng, lo=-9, hi=9):
    while True:
        num = rng.randint(lo, hi)
        den = rng.randint(1, hi)
        if num:
            return Fraction(num, den)


def random_andrews_instance(rng: random.Random, m: int, N: int, seed=None) -> AndrewsInstance:
    """A non-degenerate instance with random rational parameters and base."""
    while True:
        q = random_rational(rng)
        if abs(q) == 1:
            continue
        a = random_rational(rng)
        bs = [random_rational(rng) for _ in range(m + 1)]
        cs = [random_rational(rng) for _ in range(m + 1)]
        inst = AndrewsInstance(m, N, a, bs, cs, q, seed)
        try:
            andrews_transform(inst)
        except (ValueError, ZeroDivisionError):
            continue
        return inst


# --------------------------------------------------------------------------
# the Andrews transformation applied to sum_{j>=k} (1 - q^(n-2j) u^2) e_j(u)


def andrews_applied_parameters(params: FormParams, k: int, order: int) -> AndrewsInstance:
    A, r, n = params.A, params.r, params.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    half = A // 2
    zero = RatFunc.const(0)
    one = RatFunc.const(1)
    u = Jet([one, one] + [zero] * (order - 1)) if order else Jet([one])
    u2 = u * u
    P = lambda e: RatFunc.q_power(-e)  # noqa: E731  p^e with p = 1/q
    a = u2 * P(2 * k - n)
    low = u * P(k - n)
    bs = [u * P(r * n + k + 1)] + [low] * half + [Jet.constant(P(1), order)]
    cs = [low] * half + [u2 * P(k + 1), low]
    return AndrewsInstance(half + 1, n - k, a, bs, cs, P(1))


def andrews_applied_sum(params: FormParams, k: int, order: int) -> Jet:
    """Jet at u = 1 of e_k(u)(1 - a) times the Andrews right-hand side.

    The summand's pole at u = 1 (present when n >= 2k) is cancelled by the
    factor 1 - a = 1 - q^(n-2k) u^2 before the final division, so the work
    is done one order higher and truncated.
    """
    work = order + 1
    inst = andrews_applied_parameters(params, k, work)
    ek = e_j_jet(params, k, work)
    pre = ek * (RatFunc.const(1) - inst.a)
    out = andrews_rhs(inst, premultiplier=pre)
    return out.truncate(order)


def andrews_applied_check(params: FormParams, k: int, order: int) -> dict:
    direct = _to_ratjet(_sufficient_fracjet(params, k, max(order, 2))).truncate(order)
    via_rhs = andrews_applied_sum(params, k, order)
    work = order + 1
    inst = andrews_applied_parameters(params, k, work)
    pre = e_j_jet(params, k, work) * (RatFunc.const(1) - inst.a)
    via_lhs = andrews_lhs(inst, premultiplier=pre, order=order).truncate(order)
    quotient = via_rhs[0] / (RatFunc.const(1) - RatFunc.q_power(-k))
    divisible = laurent_membership(quotient, "Z_q_invq")[0]
    return {
        "params": {"A": params.A, "r": params.r, "n": params.n},
        "k": k,
        "order": order,
        "rhs_equal": direct == via_rhs,
        "lhs_equal": direct == via_lhs,
        "value_divisible": divisible,
        "pass": direct == via_rhs and direct == via_lhs and divisible,
    }


# --------------------------------------------------------------------------
# building blocks R0, R1, R2


def _check_block(block):
    kind = block[0]
    if kind == "R0":
        _, al, be, ga = block
        if not al <= ga < be:
            raise ValueError("R0 needs alpha <= gamma < beta")
        return be - al - 1
    if kind == "R1":
        _, n, i, j, r = block
        if not n >= j >= i >= 0 or r < 1:
            raise ValueError("R1 needs n >= j >= i >= 0 and r >= 1")
        return n
    if kind == "R2":
        _, n, k, m1, m2 = block
        if not (k >= 1 and 0 <= m2 <= m1 <= n - k):
            raise ValueError("R2 needs k >= 1 and 0 <= m2 <= m1 <= n - k")
        return n
    raise ValueError(f"unknown block {kind!r}")


def _block_factors(block):
    """(constant CycloFraction, list of (a, length, u_exp, power))."""
    kind = block[0]
    if kind == "R0":
        _, al, be, ga = block
        const = _qfact_power(be - al - 1, 1)
        facs = [(al - ga, ga - al, 1, -1), (1, be - ga - 1, 1, -1)]
        return const, facs
    if kind == "R1":
        _, n, i, j, r = block
        L = r * n - n + j
        const = _qfact_power(r * n, 1) * _qfact_power(n, -r) * _qfact_power(L, -1)
        return const, [(n + i - j + 1, L, 1, 1)]
    _, n, k, m1, m2 = block
    const = _qfact_power(n, 1)
    facs = [
        (1, n, 1, -1),
        (0, m1 - m2, -1, 1),
        (1, k - 1, 2, -1),
        (1, k + m2, 2, 1),
        (1, k + m1, 1, -1),
        (1, n - m1 - 1, 1, 1),
        (1, n - k - m1, -1, -1),
    ]
    return const, facs


def building_block_jet(block, order: int, u_exponent: int = 1) -> FracJet:
    """Jet at u = 1 of the block with u replaced by u^u_exponent."""
    _check_block(block)
    if u_exponent == 0:
        raise ValueError("u exponent must be non-zero")
    const, facs = _block_factors(block)
    out = FracJet.from_jet(Jet.constant(LaurentPoly([1]), order)) * const
    for a, length, ue, power in facs:
        if length:
            out = out * u_pochhammer_jet(a, length, ue * u_exponent, order, power)
    return out


def building_block_membership(block, l: int, u_exponent: int = 1) -> bool:
    """d_idx(q)^l times the l-th Taylor coefficient lies in Z[q, 1/q]."""
    idx = _check_block(block)
    cf = building_block_jet(block, l, u_exponent).coefficient(l)
    if idx > 0 and l > 0:
        cf = cf * LaurentPoly.from_intpoly(d_n(idx) ** l)
    return laurent_membership(cf.to_ratfunc(), "Z_q_invq")[0]


def building_block_value(block, l: int, u_exponent: int = 1) -> RatFunc:
    return building_block_jet(block, l, u_exponent).coefficient(l).to_ratfunc()


def r1_valuation_certificate(n: int, i: int, j: int, r: int, l: int) -> bool:
    """Membership of d_n(q)^l R1^(l)/l! at u = 1 read off cyclotomic valuations.

    The l-th coefficient is a signed sum over g_1 < ... < g_l in 1..L of
    q-monomials times R1(1) / prod (1 - q^(n+i-j+g)), L = rn - n + j.  Each
    summand has non-negative phi_t-order after multiplying by d_n(q)^l
    exactly when the valuation count below is non-negative.
    """
    L = r * n - n + j
    if l > L:
        return True
    shift = n + i - j
    base = [(m, 1) for m in range(1, r * n + 1)]
    base += [(m, -r) for m in range(1, n + 1)]
    base += [(shift + g, 1) for g in range(1, L + 1)]
    base += [(m, -1) for m in range(1, L + 1)]
    top = max([r * n, shift + L, 1])
    for gs in _subsets(L, l):
        facs = base + [(shift + g, -1) for g in gs]
        for t in range(1, top + 1):
            ordt = sum(mult for m, mult in facs if m % t == 0)
            ordt += l * (1 if t <= n else 0)
            if ordt < 0:
                return False
    return True


def _subsets(L, l):
    from itertools import combinations

    return combinations(range(1, L + 1), l)


def r1_direct_orders(n: int, i: int, j: int, r: int, l: int) -> dict:
    """phi_t-orders of the canonical denominator of d_n(q)^l R1^(l)/l! (direct route)."""
    f = building_block_value(("R1", n, i, j, r), l)
    f = f * RatFunc.from_laurent(LaurentPoly.from_intpoly(d_n(n) ** l)) if l else f
    out = {}
    top = max(r * n + n, 1)
    for t in range(1, top + 1):
        out[t] = cyclotomic_ord(f.den, t) if f.den.degree > 0 else 0
    return out


def building_block_grid(n_max: int):
    """Every R0, R1 (r = 1, 2) and R2 block with index at most ``n_max``."""
    for al in range(-2, 3):
        for be in range(al + 1, al + n_max + 2):
            for ga in range(al, be):
                yield ("R0", al, be, ga)
    for n in range(1, n_max + 1):
        for r in (1, 2):
            for j in range(n + 1):
                for i in range(j + 1):
                    yield ("R1", n, i, j, r)
        for k in range(1, n + 1):
            for m1 in range(n - k + 1):
                for m2 in range(m1 + 1):
                    yield ("R2", n, k, m1, m2)
