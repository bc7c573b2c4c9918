"""Creative telescoping for single sums G(n) = sum_k F(n, k).

The telescoper P(E, Q) and certificate R(n, k) satisfy

    sum_i p_i(Q) F(n + i, k) = G(n, k + 1) - G(n, k),   G = R F,

and are found with the q-Gosper reduction applied to the ansatz
t_k = sum_i p_i F(n + i, k) with unknown p_i.  Summing over the natural
support of F gives P G(n) = rhs(n); the right side is taken from exact
evaluation and, when possible, matched to the boundary term -G(n, 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..hyper import Binomial, FactoredRat, HyperTerm, PoleError, SupportError, multisum
from ..qring import CoeffPoly, CoeffRat, RatFunc
from ..qring.linalg import nullspace_coeffpoly, primitive_vector
from .recurrence import GENS, Recurrence
from .weyl import WeylOperator

QK = ("Q", "K")


class TelescopeError(RuntimeError):
    pass


@dataclass(frozen=True)
class Telescoper:
    """Result of one q-Zeilberger run."""

    coeffs: tuple[CoeffPoly, ...]  # p_0..p_d in (q, Q)
    certificate: CoeffRat  # R(Q, K) with G = R F
    order: int


def _check_single(t: HyperTerm):
    if t.nvars != 2:
        raise TelescopeError(f"telescoping needs a single summation variable, got {t.names[1:]}")


def _coarse(exps: Sequence[int]) -> tuple[int, ...]:
    if any(x % 4 for x in exps[1:]):
        raise TelescopeError("term exponents are not integral multiples of q^n and q^k")
    return (exps[0],) + tuple(x // 4 for x in exps[1:])


def _mono_poly(exps, scalar=1) -> CoeffPoly:
    return CoeffPoly.monomial(_coarse(exps), scalar, QK)


def _binom_poly(b: Binomial) -> CoeffPoly:
    return 1 - CoeffPoly.monomial(_coarse(b.exps), b.coeff, QK)


@dataclass
class _KSplit:
    """scalar * monomial * prod binomial^m with every binomial's K-exponent >= 0."""

    scalar: Fraction
    mono: tuple[int, ...]
    num: dict
    den: dict

    @classmethod
    def of(cls, fr: FactoredRat, kidx: int = 2) -> "_KSplit":
        scalar, mono = fr.scalar, list(fr.mono)
        num: dict = {}
        den: dict = {}
        for b, m in fr.factors:
            if b.exps[kidx] < 0:
                # 1 - cM = -cM (1 - M^{-1}/c)
                scalar *= (-b.coeff) ** m
                mono = [x + y * m for x, y in zip(mono, b.exps)]
                b = b.flipped()
            target = num if m > 0 else den
            target[b] = target.get(b, 0) + abs(m)
        for b in list(num):
            if b in den:
                k = min(num[b], den[b])
                num[b] -= k
                den[b] -= k
        return cls(scalar, tuple(mono), {b: m for b, m in num.items() if m}, {b: m for b, m in den.items() if m})


def _product(binoms: dict) -> CoeffPoly:
    out = CoeffPoly.const(1, QK)
    for b, m in sorted(binoms.items()):
        out = out * _binom_poly(b) ** m
    return out


def _kshift(b: Binomial, h: int, kidx: int = 2) -> Binomial:
    return Binomial((b.exps[0] + h * b.exps[kidx],) + b.exps[1:], b.coeff)


def _gosper_split(num: dict, den: dict, kidx: int = 2):
    """Move shift-equivalent pairs into c: num/den = a/b * c(qK)/c(K)."""
    num, den = dict(num), dict(den)
    c: dict = {}
    changed = True
    while changed:
        changed = False
        for f in sorted(num):
            fk = f.exps[kidx]
            if fk == 0:
                continue
            for g in sorted(den):
                if g.exps[kidx] != fk or g.exps[1:] != f.exps[1:] or g.coeff != f.coeff:
                    continue
                diff = f.exps[0] - g.exps[0]
                if diff % fk or diff // fk < 0:
                    continue
                h = diff // fk
                for j in range(h):
                    gj = _kshift(g, j, kidx)
                    c[gj] = c.get(gj, 0) + 1
                for d, b in ((num, f), (den, g)):
                    d[b] -= 1
                    if not d[b]:
                        del d[b]
                changed = True
                break
            if changed:
                break
    return num, den, c


def _k_coeff_vector(p: CoeffPoly) -> dict[int, CoeffPoly]:
    return {k: v.with_gens(GENS) for k, v in p.coeffs_in("K").items()}


def _subs_K(p: CoeffPoly, s: int) -> CoeffPoly:
    """p(q^s K)."""
    return p.shift("K", s)


def _lead_ratio_exponent(a: CoeffPoly, b: CoeffPoly) -> int | None:
    """j with q^j a = b when b/a is a power of q, else None."""
    r = CoeffRat(b, a)
    if not (r.num.is_monomial() and r.den.is_monomial()):
        return None
    (en, cn), = r.num.terms.items()
    (ed, cd), = r.den.terms.items()
    if cn != cd or any(x != y for x, y in zip(en[1:], ed[1:])):
        return None
    d = en[0] - ed[0]
    return d // 4 if d % 4 == 0 else None


def q_zeilberger(t: HyperTerm, order: int) -> Telescoper | None:
    """Telescoper of exactly the given order, or None if none exists.

    None is a proof of nonexistence for this order: the Gosper degree
    bounds are complete for the reduced form.
    """
    _check_single(t)
    rn = t.ratio_factored(0)
    rk = t.ratio_factored(1)
    # rho_i = F(n+i, k) / F(n, k)
    rhos = [FactoredRat.one(2)]
    for i in range(1, order + 1):
        rhos.append(rhos[-1] * rn.shift(0, i - 1))
    splits = [_KSplit.of(r) for r in rhos]
    U: dict = {}
    for s in splits:
        for b, m in s.den.items():
            U[b] = max(U.get(b, 0), m)
    Upoly = _product(U)
    T = []
    for s in splits:
        rest = {b: U[b] - s.den.get(b, 0) for b in U}
        T.append(_mono_poly(s.mono, s.scalar) * _product(s.num) * _product({b: m for b, m in rest.items() if m}))
    # rbar = r U(K) / U(qK)
    Ushift = FactoredRat.one(2)
    for b, m in U.items():
        Ushift = Ushift * FactoredRat.binomial(b.exps, b.coeff, m) / FactoredRat.binomial(_kshift(b, 1).exps, b.coeff, m)
    rbar = _KSplit.of(rk * Ushift)
    kfree_num = {b: m for b, m in rbar.num.items() if b.exps[2] == 0}
    kfree_den = {b: m for b, m in rbar.den.items() if b.exps[2] == 0}
    knum = {b: m for b, m in rbar.num.items() if b.exps[2] != 0}
    kden = {b: m for b, m in rbar.den.items() if b.exps[2] != 0}
    a_b, b_b, c_b = _gosper_split(knum, kden)
    mono = list(rbar.mono)
    kpow = mono[2]
    mono[2] = 0
    Zn = _mono_poly(mono, rbar.scalar) * _product(kfree_num)
    Zd = _product(kfree_den)
    a = _product(a_b)
    b = _product(b_b)
    if kpow > 0:
        a = a.mul_monomial((0, 0, kpow // 4 if kpow % 4 == 0 else _fail()))
    elif kpow < 0:
        b = b.mul_monomial((0, 0, -kpow // 4 if kpow % 4 == 0 else _fail()))
    c = _product(c_b)
    A = Zn * a
    B = Zd * _subs_K(b, -1)
    C = Zd * c
    rhs_cols = [C * Ti for Ti in T]
    # degree bounds for x(K) = sum_{j=lo}^{hi} x_j K^j
    deg_rhs = max(p.degree("K") for p in rhs_cols if p)
    low_rhs = min(p.low_degree("K") for p in rhs_cols if p)
    dA, dB = A.degree("K"), B.degree("K")
    lA, lB = A.low_degree("K"), B.low_degree("K")
    if dA != dB:
        hi = deg_rhs - max(dA, dB)
    else:
        hi = deg_rhs - dA
        j = _lead_ratio_exponent(A.coeff("K", dA), B.coeff("K", dB))
        if j is not None:
            hi = max(hi, j)
    if lA != lB:
        lo = low_rhs - min(lA, lB)
    else:
        lo = low_rhs - lA
        j = _lead_ratio_exponent(A.coeff("K", lA), B.coeff("K", lB))
        if j is not None:
            lo = min(lo, j)
    xs = list(range(lo, hi + 1)) if hi >= lo else []
    cols = [-p for p in rhs_cols]
    for j in xs:
        Kj = CoeffPoly.monomial((0, 0, j), 1, QK)
        cols.append(A * Kj.mul_monomial((4 * j, 0, 0)) - B * Kj)
    keys = sorted({k for col in cols for k in col.coeffs_in("K")})
    vecs = [_k_coeff_vector(col) for col in cols]
    zero = CoeffPoly.const(0, GENS)
    M = [[v.get(k, zero) for v in vecs] for k in keys]
    kernel = nullspace_coeffpoly(M) if M else [[CoeffPoly.const(int(i == 0), GENS) for i in range(len(cols))]]
    sol = next((v for v in kernel if any(v[: order + 1])), None)
    if sol is None:
        return None
    sol = primitive_vector(sol)
    p = tuple(sol[: order + 1])
    if not p[-1]:
        # a lower-order telescoper embedded at this order
        return None
    x = CoeffPoly.const(0, QK)
    for j, xj in zip(xs, sol[order + 1 :]):
        x = x + xj.with_gens(QK).mul_monomial((0, 0, j))
    cert = CoeffRat(_subs_K(b, -1) * x, c * Upoly) if x else CoeffRat(CoeffPoly.const(0, QK))
    return Telescoper(p, cert, order)


def _fail():
    raise TelescopeError("K-exponent of the ratio is not integral")


def check_certificate(t: HyperTerm, tel: Telescoper, points: Sequence[tuple[int, int]]) -> bool:
    """Pointwise check of sum_i p_i F(n+i,k) = G(n,k+1) - G(n,k) at points
    where F(n,k) and F(n,k+1) are nonzero (elsewhere G is only defined as a limit)."""
    ok = 0
    for n, k in points:
        try:
            if not t.evaluate([n, k]) or not t.evaluate([n, k + 1]):
                continue
            lhs = RatFunc(0)
            for i, p in enumerate(tel.coeffs):
                lhs = lhs + t.evaluate([n + i, k]) * p.substitute(n)
            g1 = _G(t, tel, n, k + 1)
            g0 = _G(t, tel, n, k)
        except (ZeroDivisionError, PoleError):
            continue
        if lhs != g1 - g0:
            return False
        ok += 1
    return ok > 0


def _G(t, tel, n, k) -> RatFunc:
    f = t.evaluate([n, k])
    if not f:
        return RatFunc(0)
    return tel.certificate.substitute(n, K=k) * f


def _k0_closed_form(t: HyperTerm) -> CoeffRat | None:
    """F(n, 0) as a rational function of (q, Q), when every factor allows it."""
    from ..hyper import Poch, Power, QPow

    out = CoeffRat(CoeffPoly.const(1, GENS))
    for f in t.factors:
        val: CoeffRat
        if isinstance(f, QPow):
            e = f.exponent.substitute({1: 0})
            d = e.as_dict()
            if e.degree() > 1 or any(v % 4 for k, v in d.items() if k != (0, 0)):
                return None
            val = CoeffRat(CoeffPoly.monomial((e.constant(), e.coeff(0) // 4), 1, GENS))
        elif isinstance(f, Power):
            e = f.exponent.substitute({1: 0})
            a = e.coeff(0)
            if Fraction(f.base) ** a != 1:
                return None
            val = CoeffRat(CoeffPoly.const(Fraction(f.base) ** e.constant(), GENS))
        elif isinstance(f, Poch):
            cnt = f.count.substitute({1: 0})
            if cnt.depends_on(0):
                return None
            m = cnt.constant()
            base = f.base.substitute({1: 0})
            if base.coeff(0) % 4:
                return None
            poly = CoeffPoly.const(1, GENS)
            rng = range(m) if m >= 0 else range(m, 0)
            for j in rng:
                poly = poly * (1 - CoeffPoly.monomial((base.constant() + f.step * j, base.coeff(0) // 4), f.coeff, GENS))
            val = CoeffRat(poly) if m >= 0 else CoeffRat(CoeffPoly.const(1, GENS), poly)
        else:
            # brace-type factors at k = 0
            try:
                val = _brace_k0(f)
            except ValueError:
                return None
        out = out / val if f.den else out * val
    return out


def _brace_k0(f) -> CoeffRat:
    from ..hyper import Brace, BraceFall, QBinom

    def brace_poly(a):
        if a.depends_on(0) and a.coeff(0) % 2:
            raise ValueError
        e = (2 * a.constant(), 2 * a.coeff(0) // 4) if (2 * a.coeff(0)) % 4 == 0 else None
        if e is None:
            raise ValueError
        return CoeffPoly.monomial(e, 1, GENS) - CoeffPoly.monomial((-e[0], -e[1]), 1, GENS)

    def fall(top, length):
        if length.depends_on(0):
            raise ValueError
        L = length.constant()
        if L < 0:
            return CoeffPoly.const(0, GENS)
        out = CoeffPoly.const(1, GENS)
        for j in range(L):
            out = out * brace_poly(top - j)
        return out

    if isinstance(f, Brace):
        return CoeffRat(brace_poly(f.arg.substitute({1: 0})))
    if isinstance(f, BraceFall):
        return CoeffRat(fall(f.top.substitute({1: 0}), f.length.substitute({1: 0})))
    if isinstance(f, QBinom):
        top, bot = f.top.substitute({1: 0}), f.bottom.substitute({1: 0})
        return CoeffRat(fall(top, bot), fall(bot, bot))
    raise ValueError


def _sum_values(t: HyperTerm, ns) -> dict[int, RatFunc]:
    out = {}
    for n in ns:
        try:
            out[n] = multisum(t, n)
        except SupportError:
            continue
    return out


def telescope(
    t: HyperTerm,
    max_order: int = 4,
    min_order: int = 1,
    check_range: Sequence[int] | None = None,
    operator: WeylOperator | None = None,
) -> Recurrence:
    """Recurrence for sum_k t(n, k) by creative telescoping.

    With ``operator`` given (a k-free annihilator of t in (n, k)), its
    certificate decomposition is used; otherwise q-Zeilberger is run for
    orders min_order..max_order and the first order with a telescoper
    wins.  The right side is computed exactly on ``check_range`` and
    replaced by the closed boundary term -G(n, 0) when that matches.
    """
    _check_single(t)
    if operator is not None:
        from .kfree import telescope_kfree

        return telescope_kfree(t, operator, check_range)
    for d in range(min_order, max_order + 1):
        tel = q_zeilberger(t, d)
        if tel is not None:
            return telescoper_recurrence(t, tel, check_range)
    raise TelescopeError(f"no telescoper of order <= {max_order}")


def telescoper_recurrence(t: HyperTerm, tel: Telescoper, check_range: Sequence[int] | None = None) -> Recurrence:
    d = tel.order
    ns = list(check_range) if check_range is not None else list(range(0, 11))
    S = _sum_values(t, range(min(ns), max(ns) + d + 1))
    rhs_vals: dict[int, RatFunc] = {}
    for n in ns:
        if all(n + i in S for i in range(d + 1)):
            acc = RatFunc(0)
            for i, p in enumerate(tel.coeffs):
                acc = acc + S[n + i] * p.substitute(n)
            rhs_vals[n] = acc
    if not rhs_vals:
        raise TelescopeError("no n in the check range has a finite sum")
    lo, hi = min(rhs_vals), max(rhs_vals)
    if all(not v for v in rhs_vals.values()):
        return Recurrence(tel.coeffs, provenance="telescoped", verified_range=(lo, hi), label=t.label)
    closed = boundary_term(t, tel)
    if closed is not None:
        try:
            if all(closed.substitute(n) == v for n, v in rhs_vals.items()):
                return Recurrence(tel.coeffs, rhs=closed, provenance="telescoped", verified_range=(lo, hi), label=t.label)
        except ZeroDivisionError:
            pass
    return Recurrence(tel.coeffs, rhs_values=rhs_vals, provenance="telescoped", verified_range=(lo, hi), label=t.label)


def boundary_term(t: HyperTerm, tel: Telescoper) -> CoeffRat | None:
    """-R(n, 0) F(n, 0) as a rational function of (q, Q), if F(n, 0) is one."""
    f0 = _k0_closed_form(t)
    if f0 is None:
        return None
    num = tel.certificate.num.substitute(K=0)
    den = tel.certificate.den.substitute(K=0)
    if not den:
        return None
    return -(CoeffRat(num.with_gens(GENS), den.with_gens(GENS)) * f0)


def homogenize(r: Recurrence) -> Recurrence:
    """Left-multiply by the order-1 annihilator of a closed-form right side.

    For rhs = h_n(Q)/h_d(Q) the operator L = h_n(Q) h_d(qQ) E - h_n(qQ) h_d(Q)
    kills rhs, so L P is homogeneous of order d + 1.
    """
    r = r.forward()
    if r.rhs is None:
        if r.rhs_values:
            raise TelescopeError("homogenization needs a closed-form right side")
        return r
    hn, hd = r.rhs.num.with_gens(GENS), r.rhs.den.with_gens(GENS)
    L = WeylOperator.from_coeffs([-(hn.shift("Q", 1) * hd), hn * hd.shift("Q", 1)])
    op = L * r.operator()
    out = Recurrence(tuple(op.coeffs()), provenance="homogenized", label=r.label)
    return out.normalized()
