"""k-free annihilators of single-sum summands and their certificates.

An operator A = sum sigma_{i,j}(Q) E^i E_k^j with A F = 0 is found by
clearing denominators in (A F)/F and matching coefficients of Q^a K^b.
The unknowns are the rational coefficients of sigma_{i,j} up to Q-degree
D over Q(q).  A random evaluation of q modulo a prime screens out cells
with no kernel; survivors are solved exactly by fraction-free
elimination on a maximal independent row set, then checked against all
equations.
"""

from __future__ import annotations

import random
from typing import Sequence

import flint

from ..hyper import FactoredRat, HyperTerm
from ..qring import CoeffPoly, LaurentPoly, RatFunc
from ..qring.linalg import PRIMES, nullspace_fraction_free
from .recurrence import Recurrence
from .weyl import WeylOperator
from .zeilberger import QK, TelescopeError, _coarse, _check_single

VARS = ("n", "k")


def _shift_ratios(t: HyperTerm, I: int, J: int) -> dict[tuple[int, int], FactoredRat]:
    """rho_{ij} = F(n+i, k+j) / F(n, k) for 0 <= i <= I, 0 <= j <= J."""
    rn = t.ratio_factored(0)
    rk = t.ratio_factored(1)
    out = {}
    row = FactoredRat.one(2)
    for i in range(I + 1):
        if i:
            row = row * rn.shift(0, i - 1)
        cur = row
        for j in range(J + 1):
            if j:
                cur = cur * rk.shift(0, i).shift(1, j - 1)
            out[(i, j)] = cur
    return out


def _cleared(ratios: dict) -> dict[tuple[int, int], CoeffPoly]:
    """Numerators of the ratios over their common denominator, in (q, Q, K)."""
    den: dict = {}
    for r in ratios.values():
        for b, m in r.factors:
            if m < 0:
                den[b] = max(den.get(b, 0), -m)
    out = {}
    for key, r in ratios.items():
        d = dict(den)
        poly = CoeffPoly.monomial(_coarse(r.mono), r.scalar, QK)
        for b, m in r.factors:
            if m > 0:
                poly = poly * _bpoly(b) ** m
            else:
                d[b] -= -m
        for b, m in d.items():
            if m:
                poly = poly * _bpoly(b) ** m
        out[key] = poly
    # common monomial so every entry is a polynomial in Q and K
    mins = [min(e[i] for p in out.values() for e in p.terms) for i in range(3)]
    return {k: p.mul_monomial((0, -mins[1], -mins[2])) for k, p in out.items()}


def _bpoly(b) -> CoeffPoly:
    return 1 - CoeffPoly.monomial(_coarse(b.exps), b.coeff, QK)


def _system(t: HyperTerm, I: int, J: int, D: int):
    polys = _cleared(_shift_ratios(t, I, J))
    unknowns = [(i, j, d) for i in range(I + 1) for j in range(J + 1) for d in range(D + 1)]
    rows: dict[tuple[int, int], dict[int, LaurentPoly]] = {}
    for col, (i, j, d) in enumerate(unknowns):
        for e, c in polys[(i, j)].terms.items():
            key = (e[1] + d, e[2])
            r = rows.setdefault(key, {})
            r[col] = r.get(col, LaurentPoly()) + LaurentPoly.monomial(e[0], c)
    keys = sorted(rows)
    M = [[rows[k].get(c, LaurentPoly()) for c in range(len(unknowns))] for k in keys]
    return unknowns, M


def _mod_matrix(M, p: int, x: int):
    flat = [e.eval_mod(x, p) if e else 0 for r in M for e in r]
    return flint.nmod_mat(len(M), len(M[0]), flat, p)


def _independent_rows(M, p: int, x: int) -> list[int]:
    T = _mod_matrix(M, p, x).transpose()
    R, rank = T.rref()
    piv = []
    c = 0
    for r in range(rank):
        while int(R[r, c]) == 0:
            c += 1
        piv.append(c)
    return piv


def kfree_search(t: HyperTerm, I: int, J: int, D: int, seed: int = 0) -> WeylOperator | None:
    """Nonzero A = sum_{i<=I, j<=J} sigma_ij(Q) E^i E_k^j with deg_Q sigma <= D and A t = 0."""
    _check_single(t)
    unknowns, M = _system(t, I, J, D)
    ncols = len(unknowns)
    p = PRIMES[0]
    x = random.Random(seed).randrange(2, p - 1)
    rank = _mod_matrix(M, p, x).rank() if M else 0
    if rank == ncols:
        return None
    rows = _independent_rows(M, p, x) if M else []
    sub = [M[r] for r in rows]
    if sub:
        kernel = nullspace_fraction_free(sub, LaurentPoly(), LaurentPoly(1))
    else:
        kernel = [[LaurentPoly(int(i == c)) for i in range(ncols)] for c in range(ncols)]
    for vec in kernel:
        if not any(vec):
            continue
        if all(not _dot(row, vec) for row in M):
            return _normalize(_operator(unknowns, vec))
    return None


def _dot(row, vec) -> LaurentPoly:
    acc = LaurentPoly()
    for a, b in zip(row, vec):
        if a and b:
            acc = acc + a * b
    return acc


def _operator(unknowns, vec) -> WeylOperator:
    terms = {}
    for (i, j, d), c in zip(unknowns, vec):
        if c:
            terms[((d, 0), (i, j))] = c
    return WeylOperator(terms, VARS)


def _normalize(op: WeylOperator) -> WeylOperator:
    """Remove the common u-content so the lowest term is a unit-ish integer polynomial."""
    from ..qring import gcd

    g = None
    for c in op.terms.values():
        g = c if g is None else gcd(g, c)
    if g is None or g.is_constant() and g.constant_value() == 1:
        return op
    return WeylOperator({k: c.exact_div(g) for k, c in op.terms.items()}, op.variables)


def kfree_schedule(t: HyperTerm, I: int, max_J: int, max_D: int) -> tuple[int, int, WeylOperator] | None:
    """First (J, D) in lexicographic order with a k-free operator at E-order I."""
    for J in range(max_J + 1):
        for D in range(max_D + 1):
            op = kfree_search(t, I, J, D)
            if op is not None:
                return J, D, op
    return None


def annihilates(t: HyperTerm, op: WeylOperator, points: Sequence[tuple[int, int]]) -> bool:
    """Pointwise (op t)(n, k) = 0 at the given points."""
    return all(not op.apply(lambda n, k: t.evaluate([n, k]) if k >= 0 else RatFunc(0), n, k) for n, k in points)


def certificate_part(op: WeylOperator) -> WeylOperator:
    """P(E, Q) = A(E, Q, E_k = 1)."""
    terms = {}
    for (a, b), c in op.terms.items():
        if a[1]:
            raise TelescopeError("operator is not k-free")
        key = ((a[0],), (b[0],))
        terms[key] = terms[key] + c if key in terms else c
    return WeylOperator(terms, ("n",))


def telescope_kfree(t: HyperTerm, op: WeylOperator, check_range: Sequence[int] | None = None) -> Recurrence:
    """P S(n) = sum_{i,j} sigma_ij(q^n) sum_{k<j} F(n+i, k), with P = A|_{E_k=1}.

    Summing A F = 0 over k >= 0 and using sum_k F(n, k + j) = S(n) - sum_{k<j} F(n, k).
    """
    P = certificate_part(op)
    if not P:
        raise TelescopeError("certificate part vanishes at E_k = 1")
    ns = list(check_range) if check_range is not None else list(range(0, 11))
    rhs_vals = {}
    for n in ns:
        try:
            acc = RatFunc(0)
            for (a, b), c in op.terms.items():
                cv = c.shift(4 * a[0] * n)
                for k in range(b[1]):
                    f = t.evaluate([n + b[0], k])
                    if f:
                        acc = acc + f * cv
            rhs_vals[n] = acc
        except ZeroDivisionError:
            continue
    coeffs = tuple(P.coeffs())
    rec = Recurrence(coeffs, rhs_values=rhs_vals or None, provenance="telescoped", label=t.label)
    if all(not v for v in rhs_vals.values()):
        rec = Recurrence(coeffs, provenance="telescoped", label=t.label)
    return rec
