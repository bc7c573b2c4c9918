"""A priori order bounds for k-free recurrences and initial-condition counts.

Every factor of a summand is rewritten as a ratio of (q;q)-type
Pochhammer symbols with affine counts:

    poch(a; s; c)      -> one factor with count c
    binom(t, b)        -> count t over counts b and t - b
    bracefall(t, l)    -> count t over count t - l
    brace(a)           -> count a over count a - 1

S and T count numerator and denominator factors, B is the largest
absolute count coefficient plus the largest absolute coefficient of the
quadratic q-power, and the bound is (4 S T B^2)^r / r! with r summation
variables.  S and T are taken at least 1 so a summand with no
denominator still gets a finite bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..hyper import Brace, BraceFall, HyperTerm, Poch, QBinom, QPow, VarPoly
from .recurrence import Recurrence, forward_solve


@dataclass(frozen=True)
class OrderBound:
    """``global_bound`` is (4 S T B^2)^r / r!; ``refined`` sums the squared
    summation-variable slopes of the counts, raised to r and divided by r!."""

    S: int
    T: int
    B: Fraction
    r: int
    global_bound: int
    refined: int


def _counts(t: HyperTerm) -> tuple[list[VarPoly], list[VarPoly]]:
    num: list[VarPoly] = []
    den: list[VarPoly] = []
    for f in t.factors:
        if isinstance(f, Poch):
            top, bottom = [f.count], []
        elif isinstance(f, QBinom):
            top, bottom = [f.top], [f.bottom, f.top - f.bottom]
        elif isinstance(f, BraceFall):
            top, bottom = [f.top], [f.top - f.length]
        elif isinstance(f, Brace):
            top, bottom = [f.arg], [f.arg - 1]
        else:
            continue
        if f.den:
            top, bottom = bottom, top
        num.extend(top)
        den.extend(bottom)
    return num, den


def _quadratic_max(t: HyperTerm) -> Fraction:
    """Largest |coefficient| of the q-power exponent's quadratic part, in powers of q."""
    best = Fraction(0)
    for f in t.factors:
        if isinstance(f, QPow):
            for mono, c in f.exponent.terms:
                if sum(mono) == 2:
                    best = max(best, abs(Fraction(c, 4)))
    return best


def order_bound(t: HyperTerm) -> OrderBound:
    if not t.is_proper():
        raise ValueError("order bounds need a proper summand")
    r = t.nvars - 1
    num, den = _counts(t)
    counts = num + den
    lin = max((abs(c.coeff(i)) for c in counts for i in range(t.nvars)), default=0)
    B = Fraction(lin) + _quadratic_max(t)
    S, T = max(1, len(num)), max(1, len(den))
    value = (4 * S * T * B * B) ** r / math.factorial(r)
    slope_sq = sum(c.coeff(i) ** 2 for c in counts for i in t.sum_vars)
    refined = Fraction(slope_sq**r, math.factorial(r))
    return OrderBound(S, T, B, r, math.ceil(value), math.ceil(refined))


@dataclass(frozen=True)
class InitialBound:
    """A homogeneous recurrence fixes its solution from ``bound`` = order + deg_q
    initial values; ``vanishing`` lists the n >= start where the principal
    symbol vanishes, so values from ``first_forced`` on are determined by earlier ones."""

    order: int
    deg_q: int
    bound: int
    vanishing: tuple[int, ...]
    first_forced: int


def principal_q_degree(sigma) -> int:
    """Difference of extreme q-exponents of sigma(q, Q) with Q treated as a
    separate variable, rounded up to whole powers of q.

    For n beyond it, the Q^j terms of sigma(q, q^n) occupy disjoint
    q-exponent bands, so sigma(q, q^n) cannot vanish.
    """
    exps = [e[0] for e in sigma.terms]
    return -(-(max(exps) - min(exps)) // 4)


def initial_bound(r: Recurrence, start: int = 0) -> InitialBound:
    if not r.is_homogeneous():
        raise ValueError("initial-condition bounds need a homogeneous recurrence")
    sigma = r.principal_symbol
    deg = principal_q_degree(sigma)
    lo = min(start - r.offset - r.order, -deg - 1)
    vanishing = tuple(n for n in range(lo, deg + 1) if not sigma.substitute(n))
    # f(n + offset + order) is forced once sigma(q^n) != 0 for all later n
    last_bad = max((n for n in vanishing if n + r.offset + r.order >= start), default=None)
    if last_bad is None:
        first = start + r.order
    else:
        first = max(start + r.order, last_bad + r.offset + r.order + 1)
    return InitialBound(r.order, deg, r.order + deg, vanishing, first)


def check_initial_bound(r: Recurrence, values, start: int, upto: int) -> bool:
    """Forward-solve from the values before ``first_forced`` and compare with
    the given values up to ``upto``."""
    ib = initial_bound(r, start)
    seed = {n: values[n] for n in range(start, ib.first_forced)}
    try:
        out = forward_solve(r, seed, upto)
    except ZeroDivisionError:
        return False
    return all(out[n] == values[n] for n in range(ib.first_forced, upto + 1))
