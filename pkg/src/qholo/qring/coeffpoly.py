"""Polynomials in u = q^{1/4} and commuting shift symbols such as Q = q^n.

Coefficients of operators and recurrences live here.  Terms are a flat map
from exponent tuples ``(e_u, e_1, ..., e_m)`` to rationals; negative
exponents are allowed so Laurent data can pass through before clearing.
Exact division and gcd go through FLINT's multivariate integer
polynomials, which is where all the heavy lifting of the telescoping
systems happens.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

import flint

from ._parse import parse_expression
from .laurent import LaurentPoly, NotDivisibleError, Scalar, _is_scalar, _nc, _q_power, format_terms
from .ratfunc import RatFunc

DEFAULT_GENS = ("Q",)

_CTX_CACHE: dict[tuple[str, ...], "flint.fmpz_mpoly_ctx"] = {}


def _ctx(names: tuple[str, ...]):
    ctx = _CTX_CACHE.get(names)
    if ctx is None:
        ctx = flint.fmpz_mpoly_ctx.get(("u",) + names, "lex")
        _CTX_CACHE[names] = ctx
    return ctx


class CoeffPoly:
    """Element of Q[u^{+-1}, X_1^{+-1}, ..., X_m^{+-1}] for named gens X_i."""

    __slots__ = ("gens", "_t", "_h")

    def __init__(self, terms: Mapping[tuple, Scalar] | None = None, gens: Sequence[str] = DEFAULT_GENS):
        self.gens = tuple(gens)
        self._h = None
        t: dict[tuple, Scalar] = {}
        if terms:
            width = len(self.gens) + 1
            for e, c in terms.items():
                if len(e) != width:
                    raise ValueError(f"exponent {e} does not match gens {self.gens}")
                if c:
                    c = _nc(t.get(e, 0) + c)
                    if c:
                        t[e] = c
                    else:
                        t.pop(e, None)
        self._t = t

    @classmethod
    def _raw(cls, t, gens):
        obj = object.__new__(cls)
        obj.gens = gens
        obj._t = t
        obj._h = None
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, c, gens: Sequence[str] = DEFAULT_GENS) -> "CoeffPoly":
        gens = tuple(gens)
        if isinstance(c, CoeffPoly):
            return c.with_gens(gens)
        if isinstance(c, LaurentPoly):
            z = (0,) * len(gens)
            return cls._raw({(e,) + z: v for e, v in c.terms.items()}, gens)
        if _is_scalar(c):
            return cls._raw({(0,) * (len(gens) + 1): _nc(c)} if c else {}, gens)
        raise TypeError(f"cannot convert {type(c).__name__} to CoeffPoly")

    @classmethod
    def gen(cls, name: str, power: int = 1, gens: Sequence[str] = DEFAULT_GENS) -> "CoeffPoly":
        gens = tuple(gens)
        e = [0] * (len(gens) + 1)
        e[gens.index(name) + 1] = power
        return cls._raw({tuple(e): 1}, gens)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1, gens: Sequence[str] = DEFAULT_GENS) -> "CoeffPoly":
        return cls({tuple(exps): coeff}, gens)

    def with_gens(self, gens: Sequence[str]) -> "CoeffPoly":
        """Re-embed into a (super)set of generators."""
        gens = tuple(gens)
        if gens == self.gens:
            return self
        idx = []
        for g in self.gens:
            if g not in gens:
                if any(e[self.gens.index(g) + 1] for e in self._t):
                    raise ValueError(f"generator {g} is used but missing from {gens}")
                idx.append(None)
            else:
                idx.append(gens.index(g))
        t = {}
        for e, c in self._t.items():
            ne = [e[0]] + [0] * len(gens)
            for i, j in enumerate(idx):
                if j is not None:
                    ne[j + 1] = e[i + 1]
            t[tuple(ne)] = c
        return CoeffPoly._raw(t, gens)

    # inspection ----------------------------------------------------------
    @property
    def terms(self):
        return dict(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def _gi(self, var: str) -> int:
        return 0 if var in ("u", "q") else self.gens.index(var) + 1

    def degree(self, var: str = "Q") -> int:
        """Highest exponent of ``var`` (u-units for 'u'/'q'); -1 for zero."""
        if not self._t:
            return -1
        i = self._gi(var)
        return max(e[i] for e in self._t)

    def low_degree(self, var: str = "Q") -> int:
        if not self._t:
            return 0
        i = self._gi(var)
        return min(e[i] for e in self._t)

    def coeff(self, var: str, power: int) -> "CoeffPoly":
        """Coefficient of var^power, as a CoeffPoly without that variable's exponent."""
        i = self._gi(var)
        t = {}
        for e, c in self._t.items():
            if e[i] == power:
                ne = list(e)
                ne[i] = 0
                t[tuple(ne)] = c
        return CoeffPoly._raw(t, self.gens)

    def coeffs_in(self, var: str) -> dict[int, "CoeffPoly"]:
        i = self._gi(var)
        out: dict[int, dict] = {}
        for e, c in self._t.items():
            ne = list(e)
            ne[i] = 0
            out.setdefault(e[i], {})[tuple(ne)] = c
        return {k: CoeffPoly._raw(v, self.gens) for k, v in out.items()}

    def free_of(self, var: str) -> bool:
        i = self._gi(var)
        return all(e[i] == 0 for e in self._t)

    def is_constant(self) -> bool:
        return all(not any(e[1:]) for e in self._t)

    def to_laurent(self) -> LaurentPoly:
        if not self.is_constant():
            raise ValueError(f"{self} depends on {self.gens}")
        return LaurentPoly({e[0]: c for e, c in self._t.items()})

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    # arithmetic ------------------------------------------------------------
    def _coerce(self, x):
        if isinstance(x, CoeffPoly):
            if x.gens != self.gens:
                gens = self.gens + tuple(g for g in x.gens if g not in self.gens)
                return x.with_gens(gens)
            return x
        if isinstance(x, LaurentPoly) or _is_scalar(x):
            return CoeffPoly.const(x, self.gens)
        return NotImplemented

    def _align(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented, NotImplemented
        s = self if o.gens == self.gens else self.with_gens(o.gens)
        return s, o

    def __add__(self, other):
        s, o = self._align(other)
        if o is NotImplemented:
            return NotImplemented
        t = dict(s._t)
        for e, c in o._t.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = _nc(v)
            else:
                t.pop(e, None)
        return CoeffPoly._raw(t, s.gens)

    __radd__ = __add__

    def __neg__(self):
        return CoeffPoly._raw({e: -c for e, c in self._t.items()}, self.gens)

    def __sub__(self, other):
        s, o = self._align(other)
        if o is NotImplemented:
            return NotImplemented
        return s + (-o)

    def __rsub__(self, other):
        s, o = self._align(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-s)

    def __mul__(self, other):
        if _is_scalar(other):
            if not other:
                return CoeffPoly._raw({}, self.gens)
            return CoeffPoly._raw({e: _nc(c * other) for e, c in self._t.items()}, self.gens)
        s, o = self._align(other)
        if o is NotImplemented:
            return NotImplemented
        if len(s._t) * len(o._t) > 4000:
            return _from_flint_product(s, o)
        t: dict[tuple, Scalar] = {}
        for ea, ca in s._t.items():
            for eb, cb in o._t.items():
                k = tuple(x + y for x, y in zip(ea, eb))
                t[k] = t.get(k, 0) + ca * cb
        return CoeffPoly._raw({e: _nc(c) for e, c in t.items() if c}, s.gens)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if len(self._t) != 1:
                raise ValueError("negative powers are only defined for monomials")
            (e, c), = self._t.items()
            return CoeffPoly._raw({tuple(x * k for x in e): _nc(Fraction(c) ** k)}, self.gens)
        out = CoeffPoly.const(1, self.gens)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (Fraction(1) / other)
        return NotImplemented

    def mul_monomial(self, exps: Sequence[int], coeff=1) -> "CoeffPoly":
        return CoeffPoly._raw(
            {tuple(x + y for x, y in zip(e, exps)): _nc(c * coeff) for e, c in self._t.items()}, self.gens
        )

    # substitutions ---------------------------------------------------------
    def shift(self, var: str = "Q", s: int = 1) -> "CoeffPoly":
        """Substitute var -> q^s * var (the action of E^s when var = q^n)."""
        if not s:
            return self
        i = self._gi(var)
        return CoeffPoly._raw(
            {(e[0] + 4 * s * e[i],) + e[1:]: c for e, c in self._t.items()}, self.gens
        )

    def subs_u_power(self, k: int) -> "CoeffPoly":
        """u -> u^k (k = -1 mirrors q)."""
        t = {}
        for e, c in self._t.items():
            ne = (e[0] * k,) + e[1:]
            t[ne] = _nc(t.get(ne, 0) + c)
        return CoeffPoly({e: c for e, c in t.items()}, self.gens)

    def substitute(self, n: int | None = None, **values: int) -> "LaurentPoly | CoeffPoly":
        """Replace Q by q^n and any named gen X by q^value.

        Returns a LaurentPoly once every generator has been replaced.
        """
        vals = dict(values)
        if n is not None:
            vals["Q"] = n
        idx = [(self.gens.index(g) + 1, v) for g, v in vals.items() if g in self.gens]
        keep = [i for i in range(1, len(self.gens) + 1) if i not in {j for j, _ in idx}]
        t: dict[tuple, Scalar] = {}
        for e, c in self._t.items():
            eu = e[0] + 4 * sum(e[j] * v for j, v in idx)
            ne = (eu,) + tuple(e[i] for i in keep)
            t[ne] = t.get(ne, 0) + c
        if not keep:
            return LaurentPoly({e[0]: c for e, c in t.items()})
        gens = tuple(self.gens[i - 1] for i in keep)
        return CoeffPoly({e: c for e, c in t.items()}, gens)

    def subs_u_exponents(self, values: Mapping[str, int]) -> "LaurentPoly | CoeffPoly":
        """Replace each named gen X by u^values[X] (fine symbols stand for u^x)."""
        idx = [(self.gens.index(g) + 1, v) for g, v in values.items() if g in self.gens]
        used = {j for j, _ in idx}
        keep = [i for i in range(1, len(self.gens) + 1) if i not in used]
        t: dict[tuple, Scalar] = {}
        for e, c in self._t.items():
            ne = (e[0] + sum(e[j] * v for j, v in idx),) + tuple(e[i] for i in keep)
            t[ne] = t.get(ne, 0) + c
        if not keep:
            return LaurentPoly({e[0]: c for e, c in t.items()})
        return CoeffPoly({e: c for e, c in t.items()}, tuple(self.gens[i - 1] for i in keep))

    def subs_gen(self, var: str, value: "CoeffPoly") -> "CoeffPoly":
        """Replace a generator by a polynomial (nonnegative powers only, or monomial value)."""
        self._gi(var)  # rejects unknown generators
        by = self.coeffs_in(var)
        out = CoeffPoly.const(0, self.gens)
        for k, c in by.items():
            out = out + c * (value**k)
        return out

    def eval_mod(self, point: Mapping[str, int], p: int) -> int:
        """Value mod p with u and the gens set to the given residues."""
        xs = [point["u"]] + [point[g] for g in self.gens]
        acc = 0
        for e, c in self._t.items():
            if type(c) is Fraction:
                v = c.numerator * pow(c.denominator, -1, p)
            else:
                v = c
            for x, k in zip(xs, e):
                if k:
                    v = v * pow(x, k, p)
            acc += v
        return acc % p

    # normalization -----------------------------------------------------------
    def min_exps(self) -> tuple[int, ...]:
        es = list(self._t)
        return tuple(min(e[i] for e in es) for i in range(len(self.gens) + 1))

    def content(self) -> Fraction:
        num, den = 0, 1
        for c in self._t.values():
            c = Fraction(c)
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def _lead(self):
        return self._t[max(self._t)]

    def primitive(self) -> "CoeffPoly":
        """Integer content 1, every minimal exponent 0, positive lex-leading coefficient."""
        if not self._t:
            return self
        c = self.content()
        if self._lead() < 0:
            c = -c
        m = self.min_exps()
        return CoeffPoly._raw(
            {tuple(x - y for x, y in zip(e, m)): _nc(v / c) for e, v in self._t.items()}, self.gens
        )

    def normalize_unit(self) -> tuple["CoeffPoly", Fraction, tuple[int, ...]]:
        """Return (primitive, scalar, monomial exponents) with self = scalar * monomial * primitive."""
        c = self.content()
        if self._t and self._lead() < 0:
            c = -c
        return self.primitive(), c, self.min_exps() if self._t else (0,) * (len(self.gens) + 1)

    # FLINT bridge -----------------------------------------------------------
    def to_flint(self):
        """(fmpz_mpoly, denominator, shift) with self = poly / den * monomial(shift)."""
        ctx = _ctx(self.gens)
        if not self._t:
            return ctx.from_dict({}), 1, (0,) * (len(self.gens) + 1)
        den = 1
        for c in self._t.values():
            if type(c) is Fraction:
                den = den * c.denominator // math.gcd(den, c.denominator)
        m = self.min_exps()
        d = {tuple(x - y for x, y in zip(e, m)): int(c * den) for e, c in self._t.items()}
        return ctx.from_dict(d), den, m

    @classmethod
    def from_flint(cls, poly, gens: Sequence[str], den=1, shift=None) -> "CoeffPoly":
        gens = tuple(gens)
        shift = shift or (0,) * (len(gens) + 1)
        t = {}
        for e, c in poly.to_dict().items():
            ne = tuple(int(x) + y for x, y in zip(e, shift))
            t[ne] = _nc(Fraction(int(c), den)) if den != 1 else int(c)
        return cls._raw(t, gens)

    def exact_div(self, other: "CoeffPoly | LaurentPoly | Scalar") -> "CoeffPoly":
        if _is_scalar(other):
            return self / other
        s, o = self._align(other)
        if not o:
            raise ZeroDivisionError("division by the zero polynomial")
        if not s:
            return s
        if o.is_monomial():
            (e, c), = o._t.items()
            return s.mul_monomial(tuple(-x for x in e), Fraction(1) / c)
        a, da, sa = s.to_flint()
        b, db, sb = o.to_flint()
        try:
            qt = a / b
        except Exception as exc:
            raise NotDivisibleError(f"{o} does not divide {s}") from exc
        shift = tuple(x - y for x, y in zip(sa, sb))
        return CoeffPoly.from_flint(qt, s.gens, 1, shift) * Fraction(db, da)

    def gcd(self, other: "CoeffPoly") -> "CoeffPoly":
        s, o = self._align(other)
        if not s:
            return o.primitive()
        if not o:
            return s.primitive()
        a, _, _ = s.to_flint()
        b, _, _ = o.to_flint()
        return CoeffPoly.from_flint(a.gcd(b), s.gens).primitive()

    # comparison -------------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, CoeffPoly) else other
        if o is NotImplemented:
            return NotImplemented
        if o.gens != self.gens:
            try:
                s, o = self._align(o)
            except ValueError:
                return False
            return s._t == o._t
        return self._t == o._t

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.gens, frozenset(self._t.items())))
        return self._h

    # text -------------------------------------------------------------------
    def __str__(self):
        if not self._t:
            return "0"
        groups: dict[tuple, dict[int, Scalar]] = {}
        for e, c in self._t.items():
            groups.setdefault(e[1:], {})[e[0]] = c
        parts = []
        for key in sorted(groups):
            mono = _gen_monomial(self.gens, key)
            lp = groups[key]
            if not mono:
                parts.append(format_terms(lp, _q_power))
                continue
            if len(lp) == 1:
                (e, c), = lp.items()
                qs = _q_power(e)
                body = mono if not qs else f"{qs}*{mono}"
                if c == 1:
                    parts.append(body)
                elif c == -1:
                    parts.append("-" + body)
                else:
                    parts.append(f"{c}*{body}")
            else:
                parts.append(f"({format_terms(lp, _q_power)})*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"CoeffPoly({str(self)!r}, gens={self.gens})"

    @classmethod
    def parse(cls, text: str, gens: Sequence[str] = DEFAULT_GENS) -> "CoeffPoly":
        gens = tuple(gens)
        table = _coeff_symbols(gens)
        val = parse_expression(text, table, CoeffPoly.const(1, gens))
        if isinstance(val, RatFunc):
            if not val.den.is_monomial():
                raise ValueError(f"{text!r} is not a polynomial")
            val = CoeffPoly.const(val.num, gens) * CoeffPoly.const(val.den**-1, gens)
        if not isinstance(val, CoeffPoly):
            val = CoeffPoly.const(val, gens)
        return val.with_gens(gens)



def _gen_monomial(gens, key) -> str:
    out = []
    for g, k in zip(gens, key):
        if k == 1:
            out.append(g)
        elif k > 0:
            out.append(f"{g}^{k}")
        elif k < 0:
            out.append(f"{g}^({k})")
    return "*".join(out)


def _coeff_symbols(gens):
    from .laurent import _LAURENT_SYMBOLS

    table = {}
    for name, fn in _LAURENT_SYMBOLS.items():
        table[name] = (lambda f: lambda e: CoeffPoly.const(f(e), gens))(fn)
    for g in gens:
        def make(e, g=g):
            if e.denominator != 1:
                raise ValueError(f"fractional power of {g}")
            return CoeffPoly.gen(g, int(e), gens)

        table[g] = make
    return table


def _from_flint_product(a: CoeffPoly, b: CoeffPoly) -> CoeffPoly:
    fa, da, sa = a.to_flint()
    fb, db, sb = b.to_flint()
    shift = tuple(x + y for x, y in zip(sa, sb))
    out = CoeffPoly.from_flint(fa * fb, a.gens, 1, shift)
    if da * db != 1:
        out = out * Fraction(1, da * db)
    return out


def lcm_all(polys: Sequence[CoeffPoly]) -> CoeffPoly:
    """Least common multiple (primitive) of nonzero polynomials."""
    out = None
    for p in polys:
        p = p.primitive()
        if out is None:
            out = p
            continue
        g = out.gcd(p)
        out = (out * p).exact_div(g).primitive()
    return out


class CoeffRat:
    """Quotient of two CoeffPolys reduced by their gcd; den is primitive."""

    __slots__ = ("num", "den")

    def __init__(self, num: CoeffPoly, den: CoeffPoly | None = None):
        gens = num.gens
        if den is None:
            den = CoeffPoly.const(1, gens)
        if not isinstance(den, CoeffPoly):
            den = CoeffPoly.const(den, gens)
        if not den:
            raise ZeroDivisionError("zero denominator")
        num, den = _reduce(num, den)
        self.num, self.den = num, den

    @property
    def gens(self):
        return self.num.gens

    def is_zero(self):
        return not self.num

    def __add__(self, o):
        o = _as_rat(o, self.gens)
        return CoeffRat(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return CoeffRat(-self.num, self.den)

    def __sub__(self, o):
        return self + (-_as_rat(o, self.gens))

    def __rsub__(self, o):
        return _as_rat(o, self.gens) + (-self)

    def __mul__(self, o):
        o = _as_rat(o, self.gens)
        return CoeffRat(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _as_rat(o, self.gens)
        return CoeffRat(self.num * o.den, self.den * o.num)

    def shift(self, var="Q", s=1) -> "CoeffRat":
        return CoeffRat(self.num.shift(var, s), self.den.shift(var, s))

    def substitute(self, n=None, **values) -> RatFunc:
        d = self.den.substitute(n, **values)
        if isinstance(d, LaurentPoly) and not d:
            raise ZeroDivisionError(f"denominator {self.den} vanishes at n={n}")
        return RatFunc(self.num.substitute(n, **values), d)

    def eval_mod(self, point, p):
        d = self.den.eval_mod(point, p)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.eval_mod(point, p) * pow(d, -1, p) % p

    def __eq__(self, o):
        o = _as_rat(o, self.gens)
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        n = f"({self.num})" if len(self.num) > 1 else str(self.num)
        return f"{n}/({self.den})"

    __repr__ = __str__


def _as_rat(x, gens) -> CoeffRat:
    if isinstance(x, CoeffRat):
        return x
    if isinstance(x, CoeffPoly):
        return CoeffRat(x)
    return CoeffRat(CoeffPoly.const(x, gens))


def _reduce(num: CoeffPoly, den: CoeffPoly) -> tuple[CoeffPoly, CoeffPoly]:
    if num.gens != den.gens:
        gens = num.gens + tuple(g for g in den.gens if g not in num.gens)
        num, den = num.with_gens(gens), den.with_gens(gens)
    if not num:
        return num, CoeffPoly.const(1, num.gens)
    if not den.is_monomial():
        g = num.gcd(den)
        if len(g) > 1 or not g.is_constant():
            num = num.exact_div(g)
            den = den.exact_div(g)
    prim, c, m = den.normalize_unit()
    num = num.mul_monomial(tuple(-x for x in m), Fraction(1) / c)
    return num, prim
