"""Linear q-recurrences sum_i c_i(q, q^n) f(n + offset + i) = rhs(n)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence as Seq

from ..qring import CoeffPoly, CoeffRat, LaurentPoly, ParseError, RatFunc, lcm_all
from ..qring._parse import parse_expression
from ..qring.laurent import _LAURENT_SYMBOLS
from .weyl import WeylOperator

GENS = ("Q",)
PROVENANCES = ("guessed", "telescoped", "paper-input", "homogenized", "derived")


class InsufficientRange(KeyError):
    pass


class Sequence:
    """Exact values on a contiguous range of n."""

    def __init__(self, values: Mapping[int, RatFunc | LaurentPoly] | None = None, start: int | None = None):
        vals = dict(values or {})
        if vals:
            keys = sorted(vals)
            if keys != list(range(keys[0], keys[-1] + 1)):
                raise ValueError("sequence values must cover a contiguous range")
        self._v = {n: RatFunc.of(v) for n, v in vals.items()}

    @classmethod
    def from_function(cls, fn: Callable[[int], RatFunc | LaurentPoly], ns: Iterable[int]) -> "Sequence":
        return cls({n: fn(n) for n in ns})

    @classmethod
    def from_list(cls, values: Seq, start: int = 0) -> "Sequence":
        return cls({start + i: v for i, v in enumerate(values)})

    @property
    def start(self) -> int:
        return min(self._v)

    @property
    def stop(self) -> int:
        """One past the last defined index."""
        return max(self._v) + 1

    def __contains__(self, n):
        return n in self._v

    def __getitem__(self, n: int) -> RatFunc:
        try:
            return self._v[n]
        except KeyError:
            raise InsufficientRange(f"sequence undefined at n={n}") from None

    def __len__(self):
        return len(self._v)

    def items(self):
        return sorted(self._v.items())

    def range(self) -> range:
        return range(self.start, self.stop)

    def __call__(self, n: int) -> RatFunc:
        return self[n]


def _as_lookup(f) -> Callable[[int], RatFunc]:
    if isinstance(f, Sequence):
        return f.__getitem__
    if callable(f):
        return lambda n: RatFunc.of(f(n))
    if isinstance(f, Mapping):
        def look(n):
            if n not in f:
                raise InsufficientRange(f"sequence undefined at n={n}")
            return RatFunc.of(f[n])

        return look
    raise TypeError("expected a Sequence, mapping or callable")


def _rat_symbols(gens=GENS):
    table = {}
    for name, fn in _LAURENT_SYMBOLS.items():
        table[name] = (lambda f: lambda e: CoeffRat(CoeffPoly.const(f(e), gens)))(fn)
    for g in gens:
        def make(e, g=g):
            if e.denominator != 1:
                raise ParseError(f"fractional power of {g}")
            return CoeffRat(CoeffPoly.gen(g, int(e), gens))

        table[g] = make
    return table


def parse_rational(text: str, gens: Seq[str] = GENS) -> CoeffRat:
    """Rational expression in q and Q, e.g. "q^(-1)*(q+Q)/(Q-1)"."""
    gens = tuple(gens)
    one = CoeffRat(CoeffPoly.const(1, gens))
    val = parse_expression(text, _rat_symbols(gens), one)
    if not isinstance(val, CoeffRat):
        val = CoeffRat(CoeffPoly.const(val, gens))
    return val


def _poly(c) -> CoeffPoly:
    if isinstance(c, CoeffPoly):
        return c.with_gens(GENS)
    if isinstance(c, str):
        return CoeffPoly.parse(c, GENS)
    return CoeffPoly.const(c, GENS)


@dataclass(frozen=True)
class Recurrence:
    """sum_{i=0}^{d} coeffs[i](q, q^n) f(n + offset + i) = rhs(n).

    ``rhs`` is a closed form in (q, Q) when known; ``rhs_values`` holds a
    per-n right side otherwise.  Paper-printed relations in f(n), f(n-1),
    ... are stored with offset = -order.
    """

    coeffs: tuple[CoeffPoly, ...]
    rhs: CoeffRat | None = None
    rhs_values: Mapping[int, RatFunc] | None = None
    offset: int = 0
    provenance: str = "derived"
    verified_range: tuple[int, int] | None = None
    label: str = ""

    def __post_init__(self):
        cs = tuple(_poly(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", cs)
        if not cs or not cs[-1]:
            raise ValueError("leading coefficient of a recurrence must be nonzero")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def principal_symbol(self) -> CoeffPoly:
        return self.coeffs[-1]

    def is_homogeneous(self) -> bool:
        if self.rhs is not None:
            return self.rhs.is_zero()
        return not self.rhs_values

    def q_degree(self) -> int:
        """Largest Q-degree minus smallest over all coefficients."""
        hi = max(c.degree("Q") for c in self.coeffs if c)
        lo = min(c.low_degree("Q") for c in self.coeffs if c)
        return hi - lo

    # evaluation ---------------------------------------------------------------
    def coeff_at(self, i: int, n: int) -> LaurentPoly:
        return self.coeffs[i].substitute(n)

    def rhs_at(self, n: int) -> RatFunc:
        if self.rhs is not None:
            return self.rhs.substitute(n)
        if self.rhs_values:
            if n not in self.rhs_values:
                raise InsufficientRange(f"right side unknown at n={n}")
            return RatFunc.of(self.rhs_values[n])
        return RatFunc(0)

    def residual(self, f, n: int) -> RatFunc:
        """sum_i c_i(q^n) f(n + offset + i) - rhs(n); values of f behind a
        vanishing coefficient are never requested."""
        look = _as_lookup(f)
        acc = RatFunc(0)
        for i, c in enumerate(self.coeffs):
            cv = c.substitute(n)
            if not cv:
                continue
            acc = acc + look(n + self.offset + i) * cv
        return acc - self.rhs_at(n)

    def holds_at(self, f, n: int) -> bool:
        return not self.residual(f, n)

    # transformations ------------------------------------------------------------
    def shifted(self, s: int) -> "Recurrence":
        """Same relation re-indexed so that new(n) is old(n + s)."""
        cs = tuple(c.shift("Q", s) for c in self.coeffs)
        rhs = self.rhs.shift("Q", s) if self.rhs is not None else None
        rv = {n - s: v for n, v in self.rhs_values.items()} if self.rhs_values else None
        vr = (self.verified_range[0] - s, self.verified_range[1] - s) if self.verified_range else None
        return replace(self, coeffs=cs, rhs=rhs, rhs_values=rv, offset=self.offset + s, verified_range=vr)

    def forward(self) -> "Recurrence":
        """Equivalent relation with offset 0."""
        return self.shifted(-self.offset) if self.offset else self

    def scaled(self, factor: CoeffPoly) -> "Recurrence":
        factor = _poly(factor)
        cs = tuple(c * factor for c in self.coeffs)
        rhs = self.rhs * CoeffRat(factor) if self.rhs is not None else None
        rv = None
        if self.rhs_values:
            rv = {n: RatFunc.of(v) * factor.substitute(n) for n, v in self.rhs_values.items()}
        return replace(self, coeffs=cs, rhs=rhs, rhs_values=rv)

    def normalized(self) -> "Recurrence":
        """Remove the common content and Q-monomial; leading coefficient has
        positive leading term."""
        nz = [c for c in self.coeffs if c]
        g = nz[0].primitive()
        for c in nz[1:]:
            g = g.gcd(c)
            if g.is_constant():
                break
        cs = list(self.coeffs)
        if not g.is_constant() or len(g) > 1:
            cs = [c.exact_div(g) if c else c for c in cs]
            rhs = self.rhs / CoeffRat(g) if self.rhs is not None else None
        else:
            rhs = self.rhs
        # content and monomial
        mins = tuple(min(e[i] for c in cs if c for e in c.terms) for i in range(2))
        num, den = 0, 1
        for c in cs:
            if c:
                k = c.content()
                num = math.gcd(num, k.numerator)
                den = den * k.denominator // math.gcd(den, k.denominator)
        scale = Fraction(den, num)
        lead = cs[-1]
        if lead.terms[max(lead.terms)] < 0:
            scale = -scale
        shift = tuple(-x for x in mins)
        cs = [c.mul_monomial(shift, scale) if c else c for c in cs]
        mono = CoeffPoly.monomial(shift, scale, GENS)
        if rhs is not None:
            rhs = rhs * CoeffRat(mono)
        rv = None
        if self.rhs_values:
            factor = mono
            if not g.is_constant() or len(g) > 1:
                rv = {n: RatFunc.of(v) * RatFunc(factor.substitute(n), g.substitute(n)) for n, v in self.rhs_values.items()}
            else:
                rv = {n: RatFunc.of(v) * factor.substitute(n) for n, v in self.rhs_values.items()}
        return replace(self, coeffs=tuple(cs), rhs=rhs, rhs_values=rv)

    def operator(self) -> WeylOperator:
        """The homogeneous part as sum_i c_i E^i (forward form)."""
        return WeylOperator.from_coeffs(self.forward().coeffs)

    @classmethod
    def from_operator(cls, op: WeylOperator, **kw) -> "Recurrence":
        return cls(tuple(op.coeffs()), **kw)

    # text and JSON ----------------------------------------------------------------
    def operator_text(self) -> str:
        return str(self.operator())

    def __str__(self):
        s = self.operator_text()
        if self.offset:
            s = f"[n -> n{self.offset:+d}] " + s
        if self.rhs is not None and not self.rhs.is_zero():
            s += f" = {self.rhs}"
        elif self.rhs_values:
            s += " = rhs(n) (tabulated)"
        return s

    def to_json(self) -> dict:
        out = {
            "order": self.order,
            "coeffs": [str(c) for c in self.coeffs],
            "inhomogeneous": None if self.rhs is None or self.rhs.is_zero() else str(self.rhs),
            "verified_range": list(self.verified_range) if self.verified_range else None,
        }
        if self.offset:
            out["offset"] = self.offset
        out["provenance"] = self.provenance
        if self.label:
            out["label"] = self.label
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data: Mapping | str) -> "Recurrence":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = tuple(CoeffPoly.parse(c, GENS) for c in data["coeffs"])
        if "order" in data and data["order"] != len(coeffs) - 1:
            raise ValueError("order does not match the number of coefficients")
        inh = data.get("inhomogeneous")
        rhs = parse_rational(inh) if inh else None
        vr = tuple(data["verified_range"]) if data.get("verified_range") else None
        return cls(
            coeffs,
            rhs=rhs,
            offset=int(data.get("offset", 0)),
            provenance=data.get("provenance", "paper-input"),
            verified_range=vr,
            label=data.get("label", ""),
        )


def from_backward(terms: Mapping[int, str | CoeffRat], rhs: str | CoeffRat | None = None, **kw) -> Recurrence:
    """Build sum_j a_j(n) f(n - j) = rhs(n) from rational a_j, clearing denominators.

    Stored with offset = -max j; the result holds at exactly the same n.
    """
    d = max(terms)
    rats = {j: parse_rational(a) if isinstance(a, str) else a for j, a in terms.items()}
    h = parse_rational(rhs) if isinstance(rhs, str) else rhs
    dens = [r.den for r in rats.values()] + ([h.den] if h is not None else [])
    L = lcm_all(dens)
    coeffs = []
    for i in range(d + 1):
        a = rats.get(d - i)
        if a is None or a.is_zero():
            coeffs.append(CoeffPoly.const(0, GENS))
            continue
        coeffs.append((a * CoeffRat(L)).num)
    rhs_rat = h * CoeffRat(L) if h is not None else None
    kw.setdefault("provenance", "paper-input")
    return Recurrence(tuple(coeffs), rhs=rhs_rat, offset=-d, **kw)


def verify_recurrence(r: Recurrence, f, ns: Iterable[int]) -> bool:
    """True iff the recurrence holds exactly at every n."""
    return all(r.holds_at(f, n) for n in ns)


def verify_report(r: Recurrence, f, ns: Iterable[int]) -> dict[int, bool]:
    out = {}
    for n in ns:
        try:
            out[n] = r.holds_at(f, n)
        except InsufficientRange:
            out[n] = False
    return out


def forward_solve(r: Recurrence, initial: Mapping[int, RatFunc | LaurentPoly], upto: int) -> dict[int, RatFunc]:
    """Extend initial values with f(n + offset + d) = (rhs - sum_{i<d} ...)/c_d(q^n).

    Raises ZeroDivisionError when the principal symbol vanishes at a
    needed n (then that value is not determined by earlier ones).
    """
    vals = {n: RatFunc.of(v) for n, v in initial.items()}
    d = r.order
    top = max(vals)
    while top < upto:
        target = top + 1
        n = target - r.offset - d
        cd = r.coeff_at(d, n)
        if not cd:
            raise ZeroDivisionError(f"principal symbol vanishes at n={n}; f({target}) is free")
        acc = r.rhs_at(n)
        for i in range(d):
            c = r.coeff_at(i, n)
            if c:
                acc = acc - vals[n + r.offset + i] * c
        vals[target] = acc * RatFunc(LaurentPoly(1), cd)
        top = target
    return vals
