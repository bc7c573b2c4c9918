"""Laurent polynomials in u = q^{1/4} with exact rational coefficients."""

from __future__ import annotations

import math
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from ._parse import parse_expression

Scalar = Union[int, Fraction]


class NotDivisibleError(ArithmeticError):
    """Raised when an exact division leaves a remainder."""


def _nc(c: Scalar) -> Scalar:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


_DENSE_THRESHOLD = 400  # term-pair count above which products go through flint


def _dense_mul(a: Mapping[int, Scalar], b: Mapping[int, Scalar]) -> "LaurentPoly | None":
    """Product of integral sparse maps via flint on the common exponent lattice;
    None when some coefficient is not an integer."""
    import flint

    if any(type(c) is not int for c in a.values()) or any(type(c) is not int for c in b.values()):
        return None
    a0, b0 = min(a), min(b)
    step = 0
    for e in a:
        step = math.gcd(step, e - a0)
    for e in b:
        step = math.gcd(step, e - b0)
    step = step or 1
    da = [0] * ((max(a) - a0) // step + 1)
    for e, c in a.items():
        da[(e - a0) // step] = c
    db = [0] * ((max(b) - b0) // step + 1)
    for e, c in b.items():
        db[(e - b0) // step] = c
    prod = (flint.fmpz_poly(da) * flint.fmpz_poly(db)).coeffs()
    base = a0 + b0
    return LaurentPoly._raw({base + i * step: int(c) for i, c in enumerate(prod) if c})


class LaurentPoly:
    """Element of Q[u, 1/u] where u = q^{1/4}.

    Values are immutable and kept in canonical sparse form: a map from
    exponents (in units of u) to nonzero rationals.  Integral coefficients
    are stored as ``int`` so the common case stays fast.

    >>> u = LaurentPoly.u()
    >>> u * u**3 == LaurentPoly.q()
    True
    >>> str(LaurentPoly.q(-1) + 2)
    '2 + q^(-1)'
    """

    __slots__ = ("_t", "_h")

    def __init__(self, terms: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]] | Scalar | None = None):
        t: dict[int, Scalar] = {}
        if terms is None:
            pass
        elif _is_scalar(terms):
            if terms:
                t[0] = _nc(terms)
        else:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for e, c in items:
                if not isinstance(e, int):
                    raise TypeError(f"exponent must be int, got {e!r}")
                c = _nc(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
                c = t.get(e, 0) + c
                if c:
                    t[e] = _nc(c)
                else:
                    t.pop(e, None)
        self._t = t
        self._h = None

    @classmethod
    def _raw(cls, t: dict[int, Scalar]) -> "LaurentPoly":
        obj = object.__new__(cls)
        obj._t = t
        obj._h = None
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, exp: int, coeff: Scalar = 1) -> "LaurentPoly":
        return cls._raw({exp: _nc(coeff)} if coeff else {})

    @classmethod
    def u(cls, power: int = 1) -> "LaurentPoly":
        return cls._raw({power: 1})

    @classmethod
    def v(cls, power: int = 1) -> "LaurentPoly":
        return cls._raw({2 * power: 1})

    @classmethod
    def q(cls, power: Scalar = 1) -> "LaurentPoly":
        e = Fraction(power) * 4
        if e.denominator != 1:
            raise ValueError(f"q^{power} is not an integral power of q^(1/4)")
        return cls._raw({int(e): 1})

    @classmethod
    def const(cls, c: Scalar) -> "LaurentPoly":
        return cls(c)

    # inspection ----------------------------------------------------------
    @property
    def terms(self) -> Mapping[int, Scalar]:
        return MappingProxyType(self._t)

    def items(self):
        return sorted(self._t.items())

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def min_exp(self) -> int:
        if not self._t:
            raise ValueError("zero polynomial has no exponents")
        return min(self._t)

    def max_exp(self) -> int:
        if not self._t:
            raise ValueError("zero polynomial has no exponents")
        return max(self._t)

    def span(self) -> int:
        return self.max_exp() - self.min_exp() if self._t else 0

    def coeff(self, e: int) -> Scalar:
        return self._t.get(e, 0)

    def lc(self) -> Scalar:
        return self._t[self.max_exp()]

    def tc(self) -> Scalar:
        return self._t[self.min_exp()]

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._t.get(0, 0)

    def is_integral(self) -> bool:
        return all(type(c) is int for c in self._t.values())

    def exponent_stride(self) -> int:
        """gcd of all exponents (0 for constants or zero)."""
        g = 0
        for e in self._t:
            g = math.gcd(g, e)
        return g

    # arithmetic ------------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            return x
        if _is_scalar(x):
            return LaurentPoly(x)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if len(o._t) > len(self._t):
            a, b = o._t, self._t
        else:
            a, b = self._t, o._t
        t = dict(a)
        for e, c in b.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = _nc(s)
            else:
                t.pop(e, None)
        return LaurentPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self._t.items()})

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
                return LaurentPoly._raw({})
            return LaurentPoly._raw({e: _nc(c * other) for e, c in self._t.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (eb, cb), = b.items()
            if cb == 1:
                return LaurentPoly._raw({e + eb: c for e, c in a.items()})
            return LaurentPoly._raw({e + eb: _nc(c * cb) for e, c in a.items()})
        if len(a) * len(b) >= _DENSE_THRESHOLD:
            dense = _dense_mul(a, b)
            if dense is not None:
                return dense
        t: dict[int, Scalar] = {}
        get = t.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                k = ea + eb
                t[k] = get(k, 0) + ca * cb
        return LaurentPoly._raw({e: _nc(c) for e, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            if not other:
                raise ZeroDivisionError("division of a Laurent polynomial by zero")
            f = Fraction(1) / other
            return self * f
        if isinstance(other, LaurentPoly):
            from .ratfunc import RatFunc

            return RatFunc(self, other)
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_scalar(other):
            from .ratfunc import RatFunc

            return RatFunc(LaurentPoly(other), self)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if len(self._t) != 1:
                raise ValueError("negative powers are only defined for monomials")
            (e, c), = self._t.items()
            return LaurentPoly._raw({e * k: _nc(Fraction(c) ** k)})
        out = LaurentPoly(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def shift(self, e: int) -> "LaurentPoly":
        """Multiply by u^e."""
        if not e:
            return self
        return LaurentPoly._raw({k + e: c for k, c in self._t.items()})

    def subs_power(self, k: int) -> "LaurentPoly":
        """Substitute u -> u^k (k = -1 is the mirror q -> 1/q)."""
        if k == 0:
            return LaurentPoly(sum(self._t.values(), 0))
        return LaurentPoly._raw({e * k: c for e, c in self._t.items()})

    def mirror(self) -> "LaurentPoly":
        return self.subs_power(-1)

    # exact division and gcd -----------------------------------------------
    def divmod(self, other: "LaurentPoly") -> tuple["LaurentPoly", "LaurentPoly"]:
        """Division with remainder, treating both as polynomials in u after
        shifting to lowest exponent zero; the quotient carries the shift."""
        if not other:
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if not self:
            return LaurentPoly(), LaurentPoly()
        sa, sb = self.min_exp(), other.min_exp()
        a = self.shift(-sa)._t
        b = other.shift(-sb)._t
        db = max(b)
        lcb = b[db]
        unit_lc = lcb in (1, -1)
        rem = dict(a)
        quo: dict[int, Scalar] = {}
        bitems = [(e, c) for e, c in b.items() if e != db]
        while rem:
            dr = max(rem)
            if dr < db:
                break
            c = rem.pop(dr)
            f = c * lcb if unit_lc else _nc(Fraction(c) / lcb)
            k = dr - db
            quo[k] = f
            for e, cb in bitems:
                key = e + k
                s = rem.get(key, 0) - f * cb
                if s:
                    rem[key] = _nc(s)
                else:
                    rem.pop(key, None)
        q = LaurentPoly._raw(quo).shift(sa - sb)
        r = LaurentPoly._raw(rem).shift(sa)
        return q, r

    def exact_div(self, other: "LaurentPoly | Scalar") -> "LaurentPoly":
        if _is_scalar(other):
            return self / other
        q, r = self.divmod(other)
        if r:
            raise NotDivisibleError(f"{other} does not divide {self}")
        return q

    def divides(self, other: "LaurentPoly") -> bool:
        return not other.divmod(self)[1]

    def content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        if not self._t:
            return Fraction(0)
        num = 0
        den = 1
        for c in self._t.values():
            c = Fraction(c)
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "LaurentPoly":
        """Integer-coefficient associate with content 1, lowest exponent 0 and
        positive leading coefficient."""
        if not self._t:
            return self
        c = self.content()
        if self.lc() < 0:
            c = -c
        return (self * (1 / c)).shift(-self.min_exp())

    def gcd(self, other: "LaurentPoly") -> "LaurentPoly":
        return gcd(self, other)

    # evaluation -----------------------------------------------------------
    def evaluate(self, x: Scalar) -> Fraction:
        """Value at u = x."""
        x = Fraction(x)
        return sum((c * x**e for e, c in self._t.items()), Fraction(0))

    def eval_mod(self, x: int, p: int) -> int:
        """Value at u = x in Z/p (coefficients must be p-integral)."""
        acc = 0
        for e, c in self._t.items():
            if type(c) is Fraction:
                cv = c.numerator * pow(c.denominator, -1, p) % p
            else:
                cv = c % p
            acc += cv * pow(x, e, p)
        return acc % p

    # comparison / hashing -------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._t == other._t
        if _is_scalar(other):
            return self._t == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    # text ----------------------------------------------------------------
    def __repr__(self):
        return f"LaurentPoly({str(self)!r})"

    def __str__(self):
        return format_terms(self._t, _q_power)

    def to_json(self) -> list[list]:
        return [[e, str(Fraction(c).numerator), str(Fraction(c).denominator)] for e, c in self.items()]

    @classmethod
    def from_json(cls, data) -> "LaurentPoly":
        return cls({int(e): Fraction(int(n), int(d)) for e, n, d in data})

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """Inverse of ``str``: accepts q, v (= q^(1/2)) and u (= q^(1/4))."""
        val = parse_expression(text, _LAURENT_SYMBOLS, cls(1))
        if not isinstance(val, (LaurentPoly, int, Fraction)):
            if val.den.is_monomial():
                return val.num * val.den ** -1
            raise ValueError(f"{text!r} is not a Laurent polynomial")
        return cls._coerce(val)


def _sym(scale: int):
    def make(e: Fraction) -> LaurentPoly:
        x = e * scale
        if x.denominator != 1:
            raise ValueError(f"exponent {e} is not a multiple of 1/{scale}")
        return LaurentPoly.u(int(x))

    return make


_LAURENT_SYMBOLS = {"q": _sym(4), "v": _sym(2), "u": _sym(1)}


def _q_power(e: int) -> str:
    if e == 0:
        return ""
    f = Fraction(e, 4)
    if f == 1:
        return "q"
    if f.denominator == 1 and f > 0:
        return f"q^{f.numerator}"
    return f"q^({f})"


def _fmt_coeff(c: Scalar) -> str:
    return str(c)


def format_terms(terms: Mapping, power_str, descending: bool = True) -> str:
    """Render {key: coeff} as 'c1*m1 + c2*m2 ...' with m = power_str(key)."""
    if not terms:
        return "0"
    parts = []
    for key in sorted(terms, reverse=descending):
        c = terms[key]
        mono = power_str(key)
        neg = c < 0
        a = -c if neg else c
        if mono:
            body = mono if a == 1 else f"{_fmt_coeff(a)}*{mono}"
        else:
            body = _fmt_coeff(a)
        parts.append(("-" if neg else "+", body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _to_int_list(p: LaurentPoly, stride: int) -> list[int]:
    """Dense ascending integer coefficient list of a primitive polynomial in u^stride."""
    lo = p.min_exp()
    deg = (p.max_exp() - lo) // stride
    out = [0] * (deg + 1)
    for e, c in p._t.items():
        out[(e - lo) // stride] = c
    return out


def _int_content(a: list[int]) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return g


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of dense ascending integer polynomials."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and any(r):
        k = len(r) - 1 - db
        lr = r[-1]
        r = [c * lb for c in r]
        for i, cb in enumerate(b):
            r[i + k] -= lr * cb
        while r and r[-1] == 0:
            r.pop()
    return r


def _primitive_list(a: list[int]) -> list[int]:
    g = _int_content(a)
    if g == 0:
        return []
    if a[-1] < 0:
        g = -g
    return [c // g for c in a]


def gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Greatest common divisor in Q[u, 1/u], normalized by ``primitive``.

    Primitive polynomial remainder sequence over Z on the polynomials in
    u^s, where s is the common exponent stride of both inputs.
    """
    if not a:
        return b.primitive()
    if not b:
        return a.primitive()
    a = a.primitive()
    b = b.primitive()
    stride = math.gcd(a.exponent_stride(), b.exponent_stride())
    if stride == 0:
        return LaurentPoly(1)
    x = _to_int_list(a, stride)
    y = _to_int_list(b, stride)
    if len(x) < len(y):
        x, y = y, x
    while y and len(y) > 1:
        r = _prem(x, y)
        x, y = y, _primitive_list(r)
    if not y:
        g = _primitive_list(x)
    else:
        g = [1]
    return LaurentPoly._raw({i * stride: c for i, c in enumerate(g) if c})


def lcm(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if not a or not b:
        return LaurentPoly()
    return (a * b).exact_div(gcd(a, b)).primitive()


U = LaurentPoly.u()
V = LaurentPoly.v()
Q_ = LaurentPoly.q()
ONE = LaurentPoly(1)
ZERO = LaurentPoly()
