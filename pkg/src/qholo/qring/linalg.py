"""Exact linear algebra: fraction-free elimination and modular nullspaces.

``bareiss_echelon`` works over any integral domain whose elements support
``+ - *``, truth testing and ``exact_div`` (LaurentPoly, CoeffPoly).  The
modular helpers are used by the search routines to find candidate kernels
quickly; every candidate is re-checked in exact arithmetic by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import flint

from .coeffpoly import CoeffPoly
from .laurent import LaurentPoly, lcm
from .ratfunc import RatFunc

PRIMES = (2147483629, 2147483587, 2147483579, 2147483563, 2147483549, 2147483543, 2147483497, 2147483489)


def bareiss_echelon(M: list[list[Any]]) -> tuple[list[list[Any]], list[int]]:
    """Fraction-free row echelon form of a copy of M; returns (E, pivot columns)."""
    E = [list(r) for r in M]
    if not E:
        return E, []
    rows, cols = len(E), len(E[0])
    prev = None
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        piv = None
        best = None
        for i in range(r, rows):
            x = E[i][c]
            if x:
                size = len(x) if hasattr(x, "__len__") else 1
                if best is None or size < best:
                    piv, best = i, size
        if piv is None:
            continue
        E[r], E[piv] = E[piv], E[r]
        pr = E[r]
        a = pr[c]
        for i in range(r + 1, rows):
            row = E[i]
            b = row[c]
            if not b:
                if prev is not None:
                    for j in range(c + 1, cols):
                        if row[j]:
                            row[j] = (a * row[j]).exact_div(prev)
                else:
                    for j in range(c + 1, cols):
                        if row[j]:
                            row[j] = a * row[j]
                row[c] = row[c] * 0
                continue
            for j in range(c + 1, cols):
                v = a * row[j] - b * pr[j]
                row[j] = v.exact_div(prev) if prev is not None and v else v
            row[c] = row[c] * 0
        prev = a
        pivots.append(c)
        r += 1
    return E, pivots


def _back_substitute(E, pivots, free_col: int, cols: int, zero, one):
    """Fraction-free kernel vector with x[free_col] = den, other free vars 0."""
    y = [zero] * cols
    y[free_col] = one
    for r in range(len(pivots) - 1, -1, -1):
        p = pivots[r]
        row = E[r]
        s = zero
        for j in range(p + 1, cols):
            if row[j] and y[j]:
                s = s + row[j] * y[j]
        if not s:
            continue
        a = row[p]
        y = [v * a if v else v for v in y]
        y[p] = -s
    return y


def nullspace_fraction_free(M: list[list[Any]], zero, one) -> list[list[Any]]:
    """Basis of {x : M x = 0} with ring entries (one vector per free column)."""
    if not M:
        return []
    cols = len(M[0])
    E, pivots = bareiss_echelon(M)
    free = [c for c in range(cols) if c not in set(pivots)]
    return [_back_substitute(E, pivots, f, cols, zero, one) for f in free]


@dataclass
class LinearSolution:
    """Result of ``solve_linear``: a particular solution (None when the system
    is inconsistent or homogeneous) and a basis of the homogeneous solutions."""

    particular: list[RatFunc] | None
    nullspace: list[list[RatFunc]] = field(default_factory=list)
    consistent: bool = True


def _as_laurent_rows(M, rhs):
    rows = []
    for i, r in enumerate(M):
        entries = [RatFunc.of(x) for x in r]
        if rhs is not None:
            entries.append(RatFunc.of(rhs[i]))
        den = LaurentPoly(1)
        for x in entries:
            if not x.den.is_constant():
                den = lcm(den, x.den)
        rows.append([(x.num * den.exact_div(x.den)) if x.num else LaurentPoly() for x in entries])
    return rows


def _normalize_vector(vec: list[RatFunc]) -> list[RatFunc]:
    for x in reversed(vec):
        if x:
            inv = x.inv()
            return [v * inv for v in vec]
    return vec


def solve_linear(M: Sequence[Sequence[Any]], rhs: Sequence[Any] | None = None) -> LinearSolution:
    """Solve M x = rhs (or M x = 0) over Q(q^{1/4}) exactly.

    Rows are cleared to Laurent polynomials and reduced by fraction-free
    elimination.  Nullspace vectors are scaled so their last nonzero
    entry is 1.

    >>> q = LaurentPoly.q()
    >>> solve_linear([[q]], [q**2]).particular
    [RatFunc('q')]
    """
    if not M:
        return LinearSolution([] if rhs is not None else None, [])
    cols = len(M[0])
    A = _as_laurent_rows(M, rhs)
    zero, one = LaurentPoly(), LaurentPoly(1)
    if rhs is None:
        basis = nullspace_fraction_free(A, zero, one)
        return LinearSolution(None, [_normalize_vector([RatFunc.of(v) for v in b]) for b in basis])
    E, pivots = bareiss_echelon(A)
    if cols in pivots:
        hom = [r[:cols] for r in A]
        basis = nullspace_fraction_free(hom, zero, one)
        return LinearSolution(None, [_normalize_vector([RatFunc.of(v) for v in b]) for b in basis], False)
    # augmented column acts as the "free" column with value -1
    y = _back_substitute(E, pivots, cols, cols + 1, zero, one)
    den = -y[cols]
    particular = [RatFunc(v, den) if v else RatFunc(0) for v in y[:cols]]
    basis = nullspace_fraction_free([r[:cols] for r in A], zero, one)
    return LinearSolution(particular, [_normalize_vector([RatFunc.of(v) for v in b]) for b in basis])


def nullspace_coeffpoly(M: list[list[CoeffPoly]]) -> list[list[CoeffPoly]]:
    """Kernel basis over the fraction field of CoeffPoly, returned with
    polynomial entries whose common content has been removed."""
    if not M:
        return []
    gens = next((x.gens for r in M for x in r if isinstance(x, CoeffPoly)), ("Q",))
    zero, one = CoeffPoly.const(0, gens), CoeffPoly.const(1, gens)
    rows = [[x if isinstance(x, CoeffPoly) else CoeffPoly.const(x, gens) for x in r] for r in M]
    out = []
    for vec in nullspace_fraction_free(rows, zero, one):
        out.append(primitive_vector(vec))
    return out


def primitive_vector(vec: list[CoeffPoly]) -> list[CoeffPoly]:
    """Divide a polynomial vector by the gcd of its entries."""
    g = None
    for v in vec:
        if v:
            g = v.primitive() if g is None else g.gcd(v)
            if g.is_monomial():
                break
    if g is None:
        return vec
    if not g.is_monomial() or g != 1:
        vec = [v.exact_div(g) if v else v for v in vec]
    # monomial and scalar normalization
    nz = [v for v in vec if v]
    m = tuple(min(e[i] for v in nz for e in v.terms) for i in range(len(nz[0].gens) + 1))
    num, den = 0, 1
    for v in nz:
        c = v.content()
        num = math.gcd(num, c.numerator)
        den = den * c.denominator // math.gcd(den, c.denominator)
    scale = Fraction(den, num)
    lead = next(v for v in reversed(vec) if v)
    if lead.terms[max(lead.terms)] < 0:
        scale = -scale
    return [v.mul_monomial(tuple(-x for x in m), scale) if v else v for v in vec]


# modular helpers -------------------------------------------------------------


def nullspace_mod(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[list[int]]:
    """Canonical kernel basis mod p: rows of the reduced echelon form of the
    kernel, so the basis is independent of elimination order."""
    if not rows:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    M = flint.nmod_mat(len(rows), ncols, [int(x) % p for r in rows for x in r], p)
    X, nullity = M.nullspace()
    if nullity == 0:
        return []
    vecs = [[int(X[i, j]) for i in range(ncols)] for j in range(nullity)]
    K = flint.nmod_mat(nullity, ncols, [x for v in vecs for x in v], p)
    R, rank = K.rref()
    return [[int(R[i, j]) for j in range(ncols)] for i in range(rank)]


def rank_mod(rows: Sequence[Sequence[int]], ncols: int, p: int) -> int:
    if not rows:
        return 0
    M = flint.nmod_mat(len(rows), ncols, [int(x) % p for r in rows for x in r], p)
    return M.rank()


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Fraction n/d with n/d = a mod m and |n|, d < sqrt(m/2), if it exists."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> tuple[int, int]:
    """Combine residues modulo coprime moduli."""
    t = (a2 - a1) * pow(m1, -1, m2) % m2
    return a1 + m1 * t, m1 * m2


def reconstruct_vector(
    compute: Callable[[int], list[int] | None],
    length: int,
    primes: Sequence[int] = PRIMES,
    check: Callable[[list[Fraction]], bool] | None = None,
) -> list[Fraction] | None:
    """Lift a vector known modulo several primes to Q.

    ``compute(p)`` returns the residues for prime p (or None if p is
    unlucky).  After each new prime the CRT image is rationally
    reconstructed; the first reconstruction that is stable across two
    consecutive primes and passes ``check`` is returned.
    """
    acc: list[int] | None = None
    mod = 1
    last = None
    for p in primes:
        res = compute(p)
        if res is None or len(res) != length:
            continue
        if acc is None:
            acc, mod = list(res), p
        else:
            pairs = [crt_pair(a, mod, b, p) for a, b in zip(acc, res)]
            acc = [x for x, _ in pairs]
            mod = pairs[0][1]
        cand = [rational_reconstruct(x, mod) for x in acc]
        if any(c is None for c in cand):
            last = None
            continue
        if cand == last and (check is None or check(cand)):
            return cand
        last = cand
    if last is not None and (check is None or check(last)):
        return last
    return None
