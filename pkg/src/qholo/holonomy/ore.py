"""Right division of recurrence operators over Q(q, Q).

Recurrences are unique only up to left multiplication by rational
operators, so two operators are compared by asking whether one is a left
multiple of the other: A = C B exactly when the right remainder of A by
B vanishes.
"""

from __future__ import annotations

from typing import Sequence

from ..qring import CoeffPoly, CoeffRat
from .recurrence import GENS, Recurrence
from .weyl import WeylOperator

Operator = Sequence[CoeffRat]  # forward coefficients a_0 .. a_d of sum a_i(Q) E^i


def _rat(c) -> CoeffRat:
    if isinstance(c, CoeffRat):
        return c
    return CoeffRat(c.with_gens(GENS) if isinstance(c, CoeffPoly) else CoeffPoly.const(c, GENS))


def _coeffs(x) -> list[CoeffRat]:
    if isinstance(x, Recurrence):
        x = x.forward().coeffs
    elif isinstance(x, WeylOperator):
        x = x.coeffs()
    out = [_rat(c) for c in x]
    while out and out[-1].is_zero():
        out.pop()
    return out


def right_divide(a, b) -> tuple[list[CoeffRat], list[CoeffRat]]:
    """(C, R) with A = C B + R and order(R) < order(B).

    E^s c(Q) = c(q^s Q) E^s is the only commutation used.
    """
    rem = _coeffs(a)
    div = _coeffs(b)
    if not div:
        raise ZeroDivisionError("right division by the zero operator")
    m = len(div) - 1
    quot: dict[int, CoeffRat] = {}
    while len(rem) - 1 >= m:
        s = len(rem) - 1 - m
        c = rem[-1] / div[-1].shift("Q", s)
        quot[s] = c
        for j, bj in enumerate(div):
            if not bj.is_zero():
                rem[s + j] = rem[s + j] - c * bj.shift("Q", s)
        rem.pop()
        while rem and rem[-1].is_zero():
            rem.pop()
    zero = CoeffRat(CoeffPoly.const(0, GENS))
    qlist = [quot.get(i, zero) for i in range(max(quot) + 1)] if quot else []
    return qlist, rem


def is_left_multiple(a, b) -> bool:
    """True iff A = C B for a rational operator C."""
    _, rem = right_divide(a, b)
    return not rem


def equivalent(a, b) -> bool:
    """Same operator up to a rational left factor: each divides the other on the right."""
    ca, cb = _coeffs(a), _coeffs(b)
    if len(ca) != len(cb):
        return False
    return is_left_multiple(ca, cb)
