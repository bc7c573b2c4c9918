"""Rational functions in u = q^{1/4} kept in a canonical reduced form."""

from __future__ import annotations

from fractions import Fraction

from ._parse import parse_expression
from .laurent import LaurentPoly, NotDivisibleError, _is_scalar, gcd


class RatFunc:
    """num/den with gcd(num, den) a unit.

    Canonical form: den has lowest exponent 0 and is a primitive integer
    polynomial with positive leading coefficient; zero is 0/1.  Equality is
    therefore structural.

    >>> q = LaurentPoly.q()
    >>> RatFunc(q**2 - 1, q - 1)
    RatFunc('q + 1')
    """

    __slots__ = ("num", "den", "_h")

    def __init__(self, num, den=1, *, _canonical: bool = False):
        if not isinstance(num, LaurentPoly):
            num = LaurentPoly(num)
        if not isinstance(den, LaurentPoly):
            den = LaurentPoly(den)
        self._h = None
        if _canonical:
            self.num, self.den = num, den
            return
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            self.num, self.den = num, LaurentPoly(1)
            return
        if len(den) > 1 and len(num) > 0:
            g = gcd(num, den)
            if not g.is_constant():
                num = num.exact_div(g)
                den = den.exact_div(g)
        # scale so den is primitive, positive leading coefficient, min exponent 0
        c = den.content()
        if den.lc() < 0:
            c = -c
        s = den.min_exp()
        if c != 1:
            inv = 1 / c
            num = num * inv
            den = den * inv
        self.num = num.shift(-s)
        self.den = den.shift(-s)

    @classmethod
    def of(cls, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, LaurentPoly) or _is_scalar(x):
            return cls(x)
        raise TypeError(f"cannot convert {type(x).__name__} to RatFunc")

    # predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_laurent(self) -> bool:
        return self.den.is_constant()

    def to_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise NotDivisibleError(f"{self} is not a Laurent polynomial")
        return self.num

    def is_integral_laurent(self) -> bool:
        """Membership in Z[q^{+-1}]: unit denominator, integer coefficients,
        exponents divisible by 4 in u-units."""
        return (
            self.is_laurent()
            and self.num.is_integral()
            and all(e % 4 == 0 for e in self.num.terms)
        )

    # arithmetic ------------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, LaurentPoly) or _is_scalar(x):
            return RatFunc(x)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            if not other:
                return RatFunc(0)
            return RatFunc(self.num * other, self.den, _canonical=True)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.num or not o.num:
            return RatFunc(0)
        # cross-cancel before multiplying keeps operands small
        n1, d2 = _cancel(self.num, o.den)
        n2, d1 = _cancel(o.num, self.den)
        return RatFunc(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inv(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        return RatFunc(self.num**k, self.den**k)

    def subs_power(self, k: int) -> "RatFunc":
        return RatFunc(self.num.subs_power(k), self.den.subs_power(k))

    def mirror(self) -> "RatFunc":
        return self.subs_power(-1)

    def normalize(self) -> "RatFunc":
        return RatFunc(self.num, self.den)

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    # evaluation --------------------------------------------------------------
    def evaluate(self, x) -> Fraction:
        return self.num.evaluate(x) / self.den.evaluate(x)

    def eval_mod(self, x: int, p: int) -> int:
        d = self.den.eval_mod(x, p)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.eval_mod(x, p) * pow(d, -1, p) % p

    # comparison ---------------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.num, self.den))
        return self._h

    # text -------------------------------------------------------------------
    def __str__(self):
        if self.den == 1:
            return str(self.num)
        n = str(self.num)
        if len(self.num) > 1:
            n = f"({n})"
        d = str(self.den)
        if len(self.den) > 1 or self.den.lc() != 1:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RatFunc({str(self)!r})"

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data) -> "RatFunc":
        if isinstance(data, list):
            return cls(LaurentPoly.from_json(data))
        return cls(LaurentPoly.from_json(data["num"]), LaurentPoly.from_json(data["den"]))

    @classmethod
    def parse(cls, text: str) -> "RatFunc":
        from .laurent import _LAURENT_SYMBOLS

        return cls.of(parse_expression(text, _LAURENT_SYMBOLS, LaurentPoly(1)))


def _cancel(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if len(b) <= 1 or len(a) == 0:
        return a, b
    if b.is_monomial() or a.is_monomial():
        return a, b
    g = gcd(a, b)
    if g.is_constant():
        return a, b
    return a.exact_div(g), b.exact_div(g)
