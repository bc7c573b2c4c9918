"""Proper q-hypergeometric terms, their exact multisums and shift ratios.

A term lives over variables ``(n, k1, ..., kr)`` and is a product of
atomic factors, each possibly in the denominator.  Every factor argument
is affine in the variables and the q-power exponent is a quadratic form,
so shift ratios are rational in q and the symbols q^n, q^k.

Exponents are stored in u-units (u = q^{1/4}) throughout.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .braid import BraidWord, CrossingLabels, LinearForm, label_long_knot, parse_braid
from .qring import CoeffPoly, CoeffRat, LaurentPoly, ParseError, RatFunc
from .qring._parse import parse_expression
from .qspecial import brace, brace_falling, qbinom


class SupportError(RuntimeError):
    """The summation range could not be bounded by a vanishing factor."""


class PoleError(ZeroDivisionError):
    """A denominator factor vanished at the evaluation point."""


# ---------------------------------------------------------------------------
# polynomials in the term variables (affine and quadratic exponents)


@dataclass(frozen=True)
class VarPoly:
    """Integer polynomial in the term variables, stored as {exponent tuple: int}."""

    nvars: int
    terms: tuple[tuple[tuple[int, ...], int], ...] = ()

    @staticmethod
    def make(nvars: int, terms: Mapping[tuple[int, ...], int]) -> "VarPoly":
        for e, c in terms.items():
            if Fraction(c).denominator != 1:
                raise ValueError(f"non-integral coefficient {c} in exponent polynomial")
        return VarPoly(nvars, tuple(sorted((e, int(c)) for e, c in terms.items() if c)))

    @staticmethod
    def const(nvars: int, c: int) -> "VarPoly":
        return VarPoly.make(nvars, {(0,) * nvars: c})

    @staticmethod
    def var(nvars: int, i: int, c: int = 1) -> "VarPoly":
        e = [0] * nvars
        e[i] = 1
        return VarPoly.make(nvars, {tuple(e): c})

    @staticmethod
    def affine(nvars: int, const: int, coeffs: Sequence[int]) -> "VarPoly":
        d = {(0,) * nvars: const}
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * nvars
                e[i] = 1
                d[tuple(e)] = c
        return VarPoly.make(nvars, d)

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def __call__(self, point: Sequence[int]) -> int:
        out = 0
        for e, c in self.terms:
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= x**k
            out += v
        return out

    def __add__(self, o: "VarPoly | int") -> "VarPoly":
        if isinstance(o, int):
            o = VarPoly.const(self.nvars, o)
        d = self.as_dict()
        for e, c in o.terms:
            d[e] = d.get(e, 0) + c
        return VarPoly.make(self.nvars, d)

    __radd__ = __add__

    def __neg__(self):
        return VarPoly(self.nvars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, o):
        return self + (-o if isinstance(o, VarPoly) else -o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o: "VarPoly | int") -> "VarPoly":
        if isinstance(o, int):
            return VarPoly.make(self.nvars, {e: c * o for e, c in self.terms})
        d: dict = {}
        for ea, ca in self.terms:
            for eb, cb in o.terms:
                e = tuple(x + y for x, y in zip(ea, eb))
                d[e] = d.get(e, 0) + ca * cb
        return VarPoly.make(self.nvars, d)

    __rmul__ = __mul__

    def shifted(self, i: int, s: int = 1) -> "VarPoly":
        """p(x + s e_i)."""
        d: dict = {}
        for e, c in self.terms:
            k = e[i]
            for j in range(k + 1):
                ne = list(e)
                ne[i] = j
                d[tuple(ne)] = d.get(tuple(ne), 0) + c * math.comb(k, j) * s ** (k - j)
        return VarPoly.make(self.nvars, d)

    def coeff(self, i: int) -> int:
        """Coefficient of the linear monomial x_i."""
        e = [0] * self.nvars
        e[i] = 1
        return self.as_dict().get(tuple(e), 0)

    def constant(self) -> int:
        return self.as_dict().get((0,) * self.nvars, 0)

    def linear_parts(self) -> tuple[int, list[int]]:
        if self.degree() > 1:
            raise ValueError(f"{self} is not affine")
        return self.constant(), [self.coeff(i) for i in range(self.nvars)]

    def depends_on(self, i: int) -> bool:
        return any(e[i] for e, _ in self.terms)

    def substitute(self, values: Mapping[int, int]) -> "VarPoly":
        d: dict = {}
        for e, c in self.terms:
            v = c
            ne = list(e)
            for i, x in values.items():
                if ne[i]:
                    v *= x ** ne[i]
                    ne[i] = 0
            d[tuple(ne)] = d.get(tuple(ne), 0) + v
        return VarPoly.make(self.nvars, d)

    def divides_by(self, s: int) -> bool:
        return all(c % s == 0 for _, c in self.terms)

    def floordiv(self, s: int) -> "VarPoly":
        return VarPoly.make(self.nvars, {e: c // s for e, c in self.terms})

    def to_str(self, names: Sequence[str], scale: int = 1) -> str:
        """Render p/scale as a sum of monomials."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms, key=lambda t: (-sum(t[0]), [-x for x in t[0]])):
            c = Fraction(c, scale)
            mono = "*".join(
                (names[i] if k == 1 else f"{names[i]}^{k}") for i, k in enumerate(e) if k
            )
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def _varpoly_from_text(text: str, names: Sequence[str], scale: int) -> VarPoly:
    """Parse a polynomial in the variables, multiply by ``scale`` and check integrality."""
    nv = len(names)

    class _P:
        __slots__ = ("d",)

        def __init__(self, d):
            self.d = d

        @staticmethod
        def lift(x):
            return x if isinstance(x, _P) else _P({(0,) * nv: Fraction(x)})

        def __add__(self, o):
            o = _P.lift(o)
            d = dict(self.d)
            for e, c in o.d.items():
                d[e] = d.get(e, 0) + c
            return _P(d)

        __radd__ = __add__

        def __neg__(self):
            return _P({e: -c for e, c in self.d.items()})

        def __sub__(self, o):
            return self + (-_P.lift(o))

        def __rsub__(self, o):
            return _P.lift(o) + (-self)

        def __mul__(self, o):
            o = _P.lift(o)
            d: dict = {}
            for ea, ca in self.d.items():
                for eb, cb in o.d.items():
                    e = tuple(x + y for x, y in zip(ea, eb))
                    d[e] = d.get(e, 0) + ca * cb
            return _P(d)

        __rmul__ = __mul__

    def sym(i):
        def make(e):
            if e.denominator != 1 or e < 0:
                raise ParseError("variables take nonnegative integer powers")
            ex = [0] * nv
            ex[i] = int(e)
            return _P({tuple(ex): Fraction(1)})

        return make

    table = {name: sym(i) for i, name in enumerate(names)}
    val = _P.lift(parse_expression(text, table, _P({(0,) * nv: Fraction(1)})))
    out = {}
    for e, c in val.d.items():
        c = c * scale
        if c.denominator != 1:
            raise ParseError(f"exponent {text!r} is not a multiple of 1/{scale}")
        out[e] = int(c)
    return VarPoly.make(nv, out)


# ---------------------------------------------------------------------------
# factored shift ratios
#
# Symbols are U_x = u^x for every term variable x; an exponent vector
# (e0, e1, ..., er) stands for u^{e0} U_n^{e1} U_k1^{e2} ...


def _fine_gens(names: Sequence[str]) -> tuple[str, ...]:
    return tuple("U_" + x for x in names)


def _coarse_name(x: str) -> str:
    if x == "n":
        return "Q"
    return x.upper()


def _affine_vec(exp: VarPoly) -> tuple[int, ...]:
    c, lin = exp.linear_parts()
    return (c,) + tuple(lin)


def _neg(vec: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-x for x in vec)


def _add(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True, order=True)
class Binomial:
    """1 - coeff * monomial(exps); canonical when the first nonzero variable
    exponent is positive (or, with no variables, the u-exponent)."""

    exps: tuple[int, ...]
    coeff: Fraction = Fraction(1)

    def lead_index(self) -> int | None:
        for i, e in enumerate(self.exps[1:], start=1):
            if e:
                return i
        return 0 if self.exps[0] else None

    def flipped(self) -> "Binomial":
        return Binomial(_neg(self.exps), 1 / self.coeff)

    def to_poly(self, gens) -> CoeffPoly:
        return 1 - CoeffPoly.monomial(self.exps, self.coeff, gens)

    def evaluate(self, point: Sequence[int]) -> LaurentPoly:
        e = self.exps[0] + sum(a * x for a, x in zip(self.exps[1:], point))
        return 1 - LaurentPoly.monomial(e, self.coeff)

    def shift(self, i: int, t: int) -> "Binomial":
        """Substitute x_i -> x_i + t (U_i -> u^t U_i)."""
        ex = list(self.exps)
        ex[0] += t * ex[i + 1]
        return Binomial(tuple(ex), self.coeff)


@dataclass(frozen=True)
class FactoredRat:
    """scalar * u-monomial(mono) * prod binomial^mult, multiplicities may be negative."""

    scalar: Fraction
    mono: tuple[int, ...]
    factors: tuple[tuple[Binomial, int], ...] = ()

    @staticmethod
    def one(nvars: int) -> "FactoredRat":
        return FactoredRat(Fraction(1), (0,) * (nvars + 1))

    @staticmethod
    def monomial(vec: tuple[int, ...], scalar=1) -> "FactoredRat":
        return FactoredRat(Fraction(scalar), tuple(vec))

    @staticmethod
    def binomial(vec: tuple[int, ...], coeff=1, power: int = 1) -> "FactoredRat":
        """(1 - coeff * u-monomial(vec))^power in canonical form."""
        coeff = Fraction(coeff)
        b = Binomial(tuple(vec), coeff)
        lead = b.lead_index()
        zero = (0,) * len(vec)
        if lead is None:
            c = 1 - coeff
            if c == 0:
                raise ZeroDivisionError("binomial factor vanishes identically")
            return FactoredRat(c**power, zero)
        if b.exps[lead] < 0:
            # 1 - cM = -cM (1 - M^{-1}/c)
            return FactoredRat((-coeff) ** power, tuple(x * power for x in vec), ((b.flipped(), power),))
        return FactoredRat(Fraction(1), zero, ((b, power),))

    def as_dict(self) -> dict[Binomial, int]:
        return dict(self.factors)

    def __mul__(self, o: "FactoredRat") -> "FactoredRat":
        d = self.as_dict()
        for b, m in o.factors:
            d[b] = d.get(b, 0) + m
        return FactoredRat(
            self.scalar * o.scalar,
            _add(self.mono, o.mono),
            tuple(sorted((b, m) for b, m in d.items() if m)),
        )

    def inv(self) -> "FactoredRat":
        return FactoredRat(1 / self.scalar, _neg(self.mono), tuple((b, -m) for b, m in self.factors))

    def __truediv__(self, o: "FactoredRat") -> "FactoredRat":
        return self * o.inv()

    def __pow__(self, k: int) -> "FactoredRat":
        return FactoredRat(self.scalar**k, tuple(x * k for x in self.mono), tuple((b, m * k) for b, m in self.factors if m * k))

    def shift(self, i: int, t: int = 1) -> "FactoredRat":
        """Substitute x_i -> x_i + t (the variable index i counts n as 0)."""
        mono = list(self.mono)
        mono[0] += t * mono[i + 1]
        out = FactoredRat(self.scalar, tuple(mono))
        for b, m in self.factors:
            out = out * FactoredRat.binomial(b.shift(i, t).exps, b.coeff, m)
        return out

    def numerator_factors(self) -> list[tuple[Binomial, int]]:
        return [(b, m) for b, m in self.factors if m > 0]

    def denominator_factors(self) -> list[tuple[Binomial, int]]:
        return [(b, -m) for b, m in self.factors if m < 0]

    def to_coeffrat(self, gens) -> CoeffRat:
        num = CoeffPoly.monomial(self.mono, self.scalar, gens)
        den = CoeffPoly.const(1, gens)
        for b, m in self.factors:
            p = b.to_poly(gens) ** abs(m)
            if m > 0:
                num = num * p
            else:
                den = den * p
        return CoeffRat(num, den)

    def evaluate(self, point: Sequence[int]) -> RatFunc:
        e = self.mono[0] + sum(a * x for a, x in zip(self.mono[1:], point))
        num = LaurentPoly.monomial(e, self.scalar)
        den = LaurentPoly(1)
        for b, m in self.factors:
            v = b.evaluate(point) ** abs(m)
            if m > 0:
                num = num * v
            else:
                den = den * v
        return RatFunc(num, den)


def _range_product(coeff: Fraction, base: VarPoly, step: int, lo: VarPoly | int, m: int) -> FactoredRat:
    """prod_{j=lo}^{lo+m-1} (1 - coeff u^{base + step j}); reciprocal of the
    range [lo+m, lo) when m < 0."""
    out = FactoredRat.one(base.nvars)
    if m >= 0:
        for j in range(m):
            out = out * FactoredRat.binomial(_affine_vec(base + (lo + j) * step), coeff)
    else:
        for j in range(m, 0):
            out = out * FactoredRat.binomial(_affine_vec(base + (lo + j) * step), coeff, -1)
    return out


def _brace_factored(a: VarPoly, power: int = 1) -> FactoredRat:
    """{a} = u^{2a} (1 - u^{-4a})."""
    return (FactoredRat.monomial(_affine_vec(a * 2)) * FactoredRat.binomial(_affine_vec(a * -4))) ** power


def _fall_factored(top: VarPoly, length: int) -> FactoredRat:
    """prod_{j=0}^{length-1} {top - j}, inverted for negative length."""
    out = FactoredRat.one(top.nvars)
    if length >= 0:
        for j in range(length):
            out = out * _brace_factored(top - j)
    else:
        for j in range(1, -length + 1):
            out = out * _brace_factored(top + j, -1)
    return out


# ---------------------------------------------------------------------------
# factors


def _eventually(a: int, b: int) -> int | None:
    """Smallest x0 >= 0 with a*x + b >= 0 for every x >= x0, or None."""
    if a < 0:
        return None
    if a == 0:
        return 0 if b >= 0 else None
    return max(0, -(b // a) if b < 0 else 0) if b < 0 else 0


def _eventually_all(conds: Iterable[tuple[int, int]]) -> int | None:
    x0 = 0
    for a, b in conds:
        t = _eventually(a, b)
        if t is None:
            return None
        x0 = max(x0, t)
    return x0


@dataclass(frozen=True)
class Factor:
    den: bool = False

    kind = "factor"

    def args(self) -> tuple[VarPoly, ...]:
        return ()

    def depends_on(self, i: int) -> bool:
        return any(a.depends_on(i) for a in self.args())

    def value(self, point: Sequence[int]) -> tuple[LaurentPoly, LaurentPoly]:
        """(numerator, denominator) contribution of the factor, before the den flag."""
        raise NotImplementedError

    def ratio(self, i: int) -> FactoredRat:
        """value(x + e_i) / value(x), before the den flag."""
        raise NotImplementedError

    def zero_threshold(self, fixed: Mapping[int, int], i: int) -> int | None:
        """Smallest x0 with value == 0 for all x_i >= x0 (others fixed), if known."""
        return None

    def pole_threshold(self, fixed: Mapping[int, int], i: int) -> int | None:
        """Smallest x0 with a vanishing reciprocal part for all x_i >= x0."""
        return None

    def is_proper(self) -> bool:
        return all(a.degree() <= 1 for a in self.args())


@dataclass(frozen=True)
class QPow(Factor):
    """u^{quadratic form}."""

    exponent: VarPoly = None
    kind = "qpow"

    def args(self):
        return (self.exponent,)

    def is_proper(self):
        return self.exponent.degree() <= 2

    def value(self, point):
        return LaurentPoly.u(self.exponent(point)), LaurentPoly(1)

    def ratio(self, i):
        return FactoredRat.monomial(_affine_vec(self.exponent.shifted(i) - self.exponent))

    def text(self, names):
        return f"qpow({self.exponent.to_str(names, 4)})"


@dataclass(frozen=True)
class Power(Factor):
    """base^{affine} for a nonzero rational base (sign factors use base -1)."""

    base: Fraction = Fraction(-1)
    exponent: VarPoly = None
    kind = "pow"

    def args(self):
        return (self.exponent,)

    def value(self, point):
        e = self.exponent(point)
        c = Fraction(self.base) ** e
        return LaurentPoly(c), LaurentPoly(1)

    def ratio(self, i):
        return FactoredRat.monomial((0,) * (self.exponent.nvars + 1), Fraction(self.base) ** self.exponent.coeff(i))

    def text(self, names):
        if self.base == -1:
            return f"sign({self.exponent.to_str(names)})"
        return f"pow({self.base};{self.exponent.to_str(names)})"


@dataclass(frozen=True)
class Poch(Factor):
    """(c u^{base}; u^{step})_{count} with base and count affine.

    Negative counts follow (a;q)_{-m} = 1/prod_{i=1}^{m} (1 - a q^{-i}).
    """

    coeff: Fraction = Fraction(1)
    base: VarPoly = None
    step: int = 4
    count: VarPoly = None
    kind = "poch"

    def args(self):
        return (self.base, self.count)

    def _prod(self, b: int, lo: int, m: int) -> LaurentPoly:
        out = LaurentPoly(1)
        for i in range(lo, lo + m):
            out = out * (1 - LaurentPoly.monomial(b + self.step * i, self.coeff))
            if not out:
                break
        return out

    def value(self, point):
        b = self.base(point)
        c = self.count(point)
        if c >= 0:
            return self._prod(b, 0, c), LaurentPoly(1)
        return LaurentPoly(1), self._prod(b, c, -c)

    def ratio(self, i):
        if self.base.degree() > 1 or self.count.degree() > 1:
            raise ValueError("Pochhammer arguments must be affine")
        beta = self.base.coeff(i)
        gamma = self.count.coeff(i)
        if beta % self.step:
            raise ValueError("base shift is not a multiple of the step; ratio is not a finite product")
        t = beta // self.step
        # new product over j in [t, C + gamma + t) divided by the old one over [0, C)
        new = _range_product(self.coeff, self.base, self.step, self.count, gamma + t)
        old = _range_product(self.coeff, self.base, self.step, 0, t)
        return new / old

    def _zero_index(self, fixed, i):
        """i0(x) with base + step*i0 = 0, as (slope, const), if integral."""
        if self.coeff != 1:
            return None
        b = self.base.substitute(fixed)
        if any(j != i and b.depends_on(j) for j in range(b.nvars)):
            return None
        bc, bl = b.constant(), b.coeff(i)
        if bc % self.step or bl % self.step:
            return None
        return -bl // self.step, -bc // self.step

    def zero_threshold(self, fixed, i):
        zi = self._zero_index(fixed, i)
        c = self.count.substitute(fixed)
        if zi is None or any(j != i and c.depends_on(j) for j in range(c.nvars)):
            return None
        sl, k0 = zi
        # 0 <= i0(x) <= count(x) - 1
        return _eventually_all([(sl, k0), (c.coeff(i) - sl, c.constant() - 1 - k0)])

    def pole_threshold(self, fixed, i):
        # count < 0: reciprocal part prod_{j=1}^{-count} (1 - a q^{-j}) vanishes if base = step*j
        if self.coeff != 1:
            return None
        b = self.base.substitute(fixed)
        c = self.count.substitute(fixed)
        if any(j != i and (b.depends_on(j) or c.depends_on(j)) for j in range(b.nvars)):
            return None
        bc, bl = b.constant(), b.coeff(i)
        if bc % self.step or bl % self.step:
            return None
        sl, j0 = bl // self.step, bc // self.step
        # 1 <= j0(x) <= -count(x)
        return _eventually_all([(sl, j0 - 1), (-c.coeff(i) - sl, -c.constant() - j0)])

    def text(self, names):
        coeff = "" if self.coeff == 1 else ("-" if self.coeff == -1 else f"{self.coeff}*")
        return (
            f"poch({coeff}q^({self.base.to_str(names, 4)});"
            f"q^({Fraction(self.step, 4)});{self.count.to_str(names)})"
        )


@dataclass(frozen=True)
class Brace(Factor):
    """{a} = v^a - v^{-a}."""

    arg: VarPoly = None
    kind = "brace"

    def args(self):
        return (self.arg,)

    def value(self, point):
        return brace(self.arg(point)), LaurentPoly(1)

    def ratio(self, i):
        return _brace_factored(self.arg.shifted(i)) / _brace_factored(self.arg)

    def zero_threshold(self, fixed, i):
        a = self.arg.substitute(fixed)
        if not a.terms:
            return 0
        return None

    def text(self, names):
        return f"brace({self.arg.to_str(names)})"


@dataclass(frozen=True)
class BraceFall(Factor):
    """{top}_{length}; zero for negative length."""

    top: VarPoly = None
    length: VarPoly = None
    kind = "bracefall"

    def args(self):
        return (self.top, self.length)

    def value(self, point):
        return brace_falling(self.top(point), self.length(point)), LaurentPoly(1)

    def ratio(self, i):
        # {A}_L = prod_{j=low+1}^{A} {j} with low = A - L; shifting moves both ends
        alpha = self.top.coeff(i)
        gamma = self.length.coeff(i)
        low = self.top - self.length
        return _fall_factored(self.top.shifted(i), alpha) / _fall_factored(low + (alpha - gamma), alpha - gamma)

    def zero_threshold(self, fixed, i):
        return _fall_zero(self.top.substitute(fixed), self.length.substitute(fixed), i)

    def text(self, names):
        return f"bracefall({self.top.to_str(names)},{self.length.to_str(names)})"


def _fall_zero(top: VarPoly, length: VarPoly, i: int) -> int | None:
    if any(j != i and (top.depends_on(j) or length.depends_on(j)) for j in range(top.nvars)):
        return None
    ta, tb = top.coeff(i), top.constant()
    la, lb = length.coeff(i), length.constant()
    cands = []
    # length < 0 eventually
    t = _eventually(-la, -lb - 1)
    if t is not None:
        cands.append(t)
    # 0 <= top <= length - 1 eventually
    t = _eventually_all([(ta, tb), (la - ta, lb - tb - 1)])
    if t is not None:
        cands.append(t)
    return min(cands) if cands else None


@dataclass(frozen=True)
class QBinom(Factor):
    """{top}_{bottom} / {bottom}_{bottom}; zero for negative bottom."""

    top: VarPoly = None
    bottom: VarPoly = None
    kind = "binom"

    def args(self):
        return (self.top, self.bottom)

    def value(self, point):
        return qbinom(self.top(point), self.bottom(point)), LaurentPoly(1)

    def ratio(self, i):
        return BraceFall(top=self.top, length=self.bottom).ratio(i) / BraceFall(top=self.bottom, length=self.bottom).ratio(i)

    def zero_threshold(self, fixed, i):
        return _fall_zero(self.top.substitute(fixed), self.bottom.substitute(fixed), i)

    def text(self, names):
        return f"binom({self.top.to_str(names)},{self.bottom.to_str(names)})"


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class HyperTerm:
    """Product of factors over variables ``names`` (first is n, rest are summed)."""

    names: tuple[str, ...]
    factors: tuple[Factor, ...]
    label: str = ""

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def sum_vars(self) -> tuple[int, ...]:
        return tuple(range(1, self.nvars))

    def index(self, var: str | int) -> int:
        return var if isinstance(var, int) else self.names.index(var)

    def is_proper(self) -> bool:
        """Structural shape check: affine factor arguments, quadratic q-power."""
        return all(f.is_proper() for f in self.factors)

    def eval_parts(self, point: Sequence[int]) -> tuple[LaurentPoly, LaurentPoly]:
        num = LaurentPoly(1)
        den = LaurentPoly(1)
        for f in self.factors:
            a, b = f.value(point)
            if f.den:
                a, b = b, a
            if not a:
                return LaurentPoly(), LaurentPoly(1)
            if not b:
                raise PoleError(f"factor {f.text(self.names)} has a pole at {tuple(point)}")
            num = num * a
            den = den * b
        return num, den

    def evaluate(self, point: Sequence[int]) -> RatFunc:
        num, den = self.eval_parts(point)
        if not num:
            return RatFunc(0)
        return RatFunc(num, den)

    def ratio_factored(self, var: str | int) -> FactoredRat:
        """term(x + e_var)/term(x) as a product of binomials in U_x = u^x."""
        i = self.index(var)
        out = FactoredRat.one(self.nvars)
        for f in self.factors:
            r = f.ratio(i)
            out = out * (r.inv() if f.den else r)
        return out

    def shift_ratio_fine(self, var: str | int) -> CoeffRat:
        """term(x + e_var)/term(x) in the symbols U_x = u^x."""
        return self.ratio_factored(var).to_coeffrat(_fine_gens(self.names))

    def shift_ratio(self, var: str | int) -> CoeffRat:
        """term(x + e_var)/term(x) in q and the symbols Q = q^n, K = q^k, ...

        Falls back to the fine symbols U_x = u^x when some exponent is not
        an integral multiple of q^x.
        """
        fine = self.shift_ratio_fine(var)
        coarse = _coarsen(fine, self.names)
        return coarse if coarse is not None else fine

    def text(self) -> str:
        parts = []
        for f in self.factors:
            t = f.text(self.names)
            parts.append(("/ " if f.den else "") + t)
        return " ".join(parts)

    def __str__(self):
        return self.text()

    # support ---------------------------------------------------------------
    def upper_bound(self, fixed: Mapping[int, int], i: int) -> int | None:
        """Smallest x0 such that the term vanishes for x_i >= x0 given the
        fixed values, from the first factor that provides one."""
        best = None
        for f in self.factors:
            if not f.depends_on(i):
                continue
            free_other = [j for j in range(self.nvars) if j != i and j not in fixed and f.depends_on(j)]
            if free_other:
                continue
            t = f.pole_threshold(fixed, i) if f.den else f.zero_threshold(fixed, i)
            if t is not None and (best is None or t < best):
                best = t
        return best


def _coarsen(r: CoeffRat, names: Sequence[str]) -> CoeffRat | None:
    coarse = tuple(_coarse_name(x) for x in names)

    def conv(p: CoeffPoly) -> CoeffPoly | None:
        t = {}
        for e, c in p.terms.items():
            if any(x % 4 for x in e[1:]):
                return None
            t[(e[0],) + tuple(x // 4 for x in e[1:])] = c
        return CoeffPoly(t, coarse)

    a, b = conv(r.num), conv(r.den)
    if a is None or b is None:
        return None
    return CoeffRat(a, b)


# ---------------------------------------------------------------------------
# summation


@dataclass
class _Acc:
    """Accumulates a sum of num/den pairs, grouping by denominator."""

    groups: dict = field(default_factory=dict)

    def add(self, num: LaurentPoly, den: LaurentPoly):
        if not num:
            return
        if den.is_monomial():
            num = num * den**-1
            den = LaurentPoly(1)
        prev = self.groups.get(den)
        self.groups[den] = num if prev is None else prev + num

    def total(self) -> RatFunc:
        out = RatFunc(0)
        for den, num in self.groups.items():
            if num:
                out = out + RatFunc(num, den)
        return out


def support_cap(n: int) -> int:
    return max(10 * n, 10)


def support_points(t: HyperTerm, n: int, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """Points (n, k1, ..., kr) of the detected summation box, in nested order.

    At each level the first remaining variable whose range is bounded by a
    factor (depending only on n, already fixed variables and itself) is
    enumerated next.  If no variable is bounded, or a bound exceeds the
    cap, SupportError is raised instead of truncating.
    """
    cap = support_cap(n) if cap is None else cap

    def rec(fixed: dict[int, int]):
        remaining = [i for i in t.sum_vars if i not in fixed]
        if not remaining:
            yield tuple(fixed[i] for i in range(t.nvars))
            return
        for i in remaining:
            ub = t.upper_bound(fixed, i)
            if ub is not None:
                break
        else:
            raise SupportError(
                f"no vanishing factor bounds any of {[t.names[i] for i in remaining]} at n={n}"
            )
        if ub > cap:
            raise SupportError(f"support of {t.names[i]} extends to {ub} beyond the cap {cap} at n={n}")
        for x in range(ub):
            fixed[i] = x
            yield from rec(fixed)
        del fixed[i]

    yield from rec({0: n})


def multisum(t: HyperTerm, n: int, cap: int | None = None) -> RatFunc:
    """Sum of t(n, k) over k in N^r, bounded by vanishing factors (see support_points)."""
    acc = _Acc()
    for point in support_points(t, n, cap):
        acc.add(*t.eval_parts(point))
    return acc.total()


def naive_sum(t: HyperTerm, n: int, box: int) -> RatFunc:
    """Sum over the box [0, box]^r with no support reasoning (test oracle)."""
    acc = _Acc()
    r = t.nvars - 1

    def rec(prefix):
        if len(prefix) == r:
            acc.add(*t.eval_parts([n] + prefix))
            return
        for x in range(box + 1):
            rec(prefix + [x])

    rec([])
    return acc.total()


# ---------------------------------------------------------------------------
# the braid summand


def _lf_to_varpoly(f: LinearForm, nvars: int) -> VarPoly:
    coeffs = [0] * nvars
    for j, c in f.coeffs:
        coeffs[j] = c
    return VarPoly.affine(nvars, f.constant, coeffs)


# Per-strand weight of the traced strands: "K-inverse" is v^{-(n-1-2b)},
# "half-n" is v^{n/2 - b}.  Only the former reproduces the broken trace.
TRACE_WEIGHTS = ("K-inverse", "half-n")
TRACE_WEIGHT = "K-inverse"


def build_Fw(labels: CrossingLabels, b: BraidWord | None = None, weight: str = TRACE_WEIGHT) -> HyperTerm:
    """Summand over (n, k1..kc) whose multisum is the long-knot trace.

    Product of the per-strand weights of the traced strands (see
    TRACE_WEIGHTS) and, per crossing j with inputs (x_j, y_j),
    f_{sign}(n, n; x_j, y_j, k_j).
    """
    if weight not in TRACE_WEIGHTS:
        raise ValueError(f"unknown trace weight {weight!r}")
    b = b or labels.word
    c = b.crossings
    nv = c + 1
    names = ("n",) + tuple(f"k{j}" for j in range(1, c + 1))
    n = VarPoly.var(nv, 0)
    one = VarPoly.const(nv, 1)
    factors: list[Factor] = []
    for p in range(b.strands):
        if p == labels.start - 1:
            continue
        bi = _lf_to_varpoly(labels.top[p], nv)
        if weight == "K-inverse":
            factors.append(QPow(exponent=(n - one - bi * 2) * -2))
        else:
            factors.append(QPow(exponent=n - bi * 2))
    for j in range(1, c + 1):
        x = _lf_to_varpoly(labels.x[j - 1], nv)
        y = _lf_to_varpoly(labels.y[j - 1], nv)
        k = VarPoly.var(nv, j)
        if labels.signs[j - 1] > 0:
            factors.append(Power(base=Fraction(-1), exponent=k))
            factors.append(QPow(exponent=-((n - one - x * 2) * (n - one - y * 2) + k * (k - one))))
            factors.append(QBinom(top=y + k, bottom=k))
            factors.append(BraceFall(top=n - one + k - x, length=k))
        else:
            factors.append(QPow(exponent=(n - one - x * 2 - k * 2) * (n - one - y * 2 + k * 2) + k * (k - one)))
            factors.append(QBinom(top=x + k, bottom=k))
            factors.append(BraceFall(top=n - one + k - y, length=k))
    return HyperTerm(names, tuple(factors), label=f"Fw{b}")


# ---------------------------------------------------------------------------
# named families


def twist_summand(p: int) -> HyperTerm:
    """Summand of c(p, n): (-1)^{n+1} q^{n(n+3)/2} (-1)^k q^{k(k+1)p + k(k-1)/2}
    (q^{2k+1} - 1) (q;q)_n / ((q;q)_{n+k+1} (q;q)_{n-k})."""
    return parse_term(
        f"sign(n+k) qpow(n*(n+3)/2 + k*(k+1)*({p}) + k*(k-1)/2) poch(q^(2*k+1);q;1) "
        f"poch(q;q;n) / poch(q;q;n+k+1) / poch(q;q;n-k)",
        ("n", "k"),
        label=f"twist:{p}",
    )


def figure8_summand() -> HyperTerm:
    """q^{nk} (q^{-n-1}; q^{-1})_k (q^{1-n}; q)_k."""
    return parse_term("qpow(n*k) poch(q^(-n-1);q^(-1);k) poch(q^(1-n);q;k)", ("n", "k"), label="figure8-jones")


def trefoil_intro_summand() -> HyperTerm:
    """q^{1/2 - n/2 - kn} (q^{-n}; q)_{k+1} / (1 - q^{-1})."""
    return parse_term(
        "qpow(1/2 - n/2 - k*n) poch(q^(-n);q;k+1) / poch(q^(-1);q;1)", ("n", "k"), label="trefoil-intro"
    )


FAMILIES: dict[str, Callable[..., HyperTerm]] = {
    "twist": twist_summand,
    "figure8-jones": figure8_summand,
    "trefoil-intro": trefoil_intro_summand,
}


def family(name: str) -> HyperTerm:
    """Look up "twist:p", "figure8-jones", "trefoil-intro" or "Fw:<braid or preset>"."""
    if name.startswith("twist:"):
        try:
            p = int(name.split(":", 1)[1])
        except ValueError as exc:
            raise ValueError(f"bad twist parameter in {name!r}") from exc
        return twist_summand(p)
    if name.startswith("Fw:"):
        b = parse_braid(name[3:])
        return build_Fw(label_long_knot(b), b)
    if name in FAMILIES and name != "twist":
        return FAMILIES[name]()
    raise ValueError(f"unknown family {name!r}")


# ---------------------------------------------------------------------------
# textual factor language

_TOKEN = re.compile(r"\s*(/)?\s*\*?\s*([a-z]+)\(")


def _split_args(body: str, seps: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in seps and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [s.strip() for s in out]


def _parse_qpower(text: str, names) -> tuple[Fraction, VarPoly]:
    """'q^(affine)', '-q^(...)', 'q' or '1' -> (coefficient, u-exponent)."""
    s = text.replace(" ", "")
    coeff = Fraction(1)
    if s.startswith("-"):
        coeff, s = Fraction(-1), s[1:]
    m = re.fullmatch(r"(?:(\d+(?:/\d+)?)\*)?(.*)", s)
    if m.group(1):
        coeff *= Fraction(m.group(1))
        s = m.group(2)
    nv = len(names)
    if s in ("1", ""):
        return coeff, VarPoly.const(nv, 0)
    if s == "q":
        return coeff, VarPoly.const(nv, 4)
    m = re.fullmatch(r"q\^\((.*)\)|q\^(-?\d+)", s)
    if not m:
        raise ParseError(f"expected a power of q, got {text!r}")
    expr = m.group(1) if m.group(1) is not None else m.group(2)
    return coeff, _varpoly_from_text(expr, names, 4)


def parse_term(text: str, names: Sequence[str] = ("n", "k"), label: str = "") -> HyperTerm:
    """Parse the factor language, e.g. "qpow(n*k) poch(q^(1-n);q;k) / poch(q;q;n-k)".

    Tokens: poch(base;step;count), qpow(quadratic in q-units), sign(affine),
    pow(c;affine), binom(a,b), bracefall(a,b), brace(a); a leading "/"
    marks a denominator factor.
    """
    names = tuple(names)
    pos = 0
    factors: list[Factor] = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"cannot parse factor at {text[pos:]!r}")
        den = bool(m.group(1))
        kind = m.group(2)
        depth, j = 1, m.end()
        while j < len(text) and depth:
            if text[j] == "(":
                depth += 1
            elif text[j] == ")":
                depth -= 1
            j += 1
        if depth:
            raise ParseError(f"unbalanced parentheses in {text!r}")
        body = text[m.end() : j - 1]
        pos = j
        if kind == "qpow":
            factors.append(QPow(den=den, exponent=_varpoly_from_text(body, names, 4)))
        elif kind == "sign":
            factors.append(Power(den=den, base=Fraction(-1), exponent=_varpoly_from_text(body, names, 1)))
        elif kind == "pow":
            c, e = _split_args(body, ";")
            factors.append(Power(den=den, base=Fraction(c), exponent=_varpoly_from_text(e, names, 1)))
        elif kind == "poch":
            args = _split_args(body, ";")
            if len(args) != 3:
                raise ParseError(f"poch needs base;step;count, got {body!r}")
            coeff, base = _parse_qpower(args[0], names)
            scoeff, step = _parse_qpower(args[1], names)
            if scoeff != 1 or step.degree() > 0:
                raise ParseError("Pochhammer step must be a constant power of q")
            factors.append(
                Poch(den=den, coeff=coeff, base=base, step=step.constant(), count=_varpoly_from_text(args[2], names, 1))
            )
        elif kind in ("binom", "bracefall"):
            a, b = _split_args(body, ",")
            A, B = _varpoly_from_text(a, names, 1), _varpoly_from_text(b, names, 1)
            factors.append(QBinom(den=den, top=A, bottom=B) if kind == "binom" else BraceFall(den=den, top=A, length=B))
        elif kind == "brace":
            factors.append(Brace(den=den, arg=_varpoly_from_text(body, names, 1)))
        else:
            raise ParseError(f"unknown factor {kind!r}")
    if not factors:
        raise ParseError("empty term")
    term = HyperTerm(names, tuple(factors), label)
    if not term.is_proper():
        raise ParseError("term is not proper: arguments must be affine and the q-power quadratic")
    return term
