"""The q-Weyl algebra: operators sum c(q) Q^a E^b over one or more variables.

For each variable x the pair (Q_x, E_x) acts on functions of x by
(Q_x f)(x) = q^x f(x) and (E_x f)(x) = f(x + 1), so E_x Q_x = q Q_x E_x
while generators of different variables commute.  Terms are kept in
normal order (all Q to the left of all E).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Sequence

from ..qring import CoeffPoly, LaurentPoly, ParseError, RatFunc
from ..qring._parse import parse_expression
from ..qring.laurent import _LAURENT_SYMBOLS

Key = tuple[tuple[int, ...], tuple[int, ...]]  # (Q exponents, E exponents)


def _q_name(var: str) -> str:
    return "Q" if var == "n" else f"Q_{var}"


def _e_name(var: str) -> str:
    return "E" if var == "n" else f"E_{var}"


class WeylOperator:
    """Normal-ordered element of the q-Weyl algebra in the given variables.

    Coefficients are Laurent polynomials in u = q^{1/4}; Q-exponents may
    be negative, E-exponents are nonnegative.
    """

    __slots__ = ("variables", "_t")

    def __init__(self, terms: Mapping[Key, LaurentPoly] | None = None, variables: Sequence[str] = ("n",)):
        self.variables = tuple(variables)
        t: dict[Key, LaurentPoly] = {}
        for k, c in (terms or {}).items():
            c = c if isinstance(c, LaurentPoly) else LaurentPoly(c)
            if any(b < 0 for b in k[1]):
                raise ValueError("negative shift powers are not in the algebra")
            if c:
                prev = t.get(k)
                c = c if prev is None else prev + c
                if c:
                    t[k] = c
                else:
                    del t[k]
        self._t = t

    # constructors -----------------------------------------------------------
    @classmethod
    def const(cls, c, variables: Sequence[str] = ("n",)) -> "WeylOperator":
        z = (0,) * len(variables)
        return cls({(z, z): c if isinstance(c, LaurentPoly) else LaurentPoly(c)}, variables)

    @classmethod
    def Q(cls, var: str = "n", power: int = 1, variables: Sequence[str] | None = None) -> "WeylOperator":
        variables = tuple(variables or (var,))
        e = [0] * len(variables)
        e[variables.index(var)] = power
        return cls({(tuple(e), (0,) * len(variables)): LaurentPoly(1)}, variables)

    @classmethod
    def E(cls, var: str = "n", power: int = 1, variables: Sequence[str] | None = None) -> "WeylOperator":
        variables = tuple(variables or (var,))
        e = [0] * len(variables)
        e[variables.index(var)] = power
        return cls({((0,) * len(variables), tuple(e)): LaurentPoly(1)}, variables)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[CoeffPoly]) -> "WeylOperator":
        """sum_i coeffs[i](q, Q) E^i for a single variable n."""
        t: dict[Key, LaurentPoly] = {}
        for i, c in enumerate(coeffs):
            for e, val in c.terms.items():
                k = ((e[1],), (i,))
                t[k] = t.get(k, LaurentPoly()) + LaurentPoly.monomial(e[0], val)
        return cls(t, ("n",))

    # inspection -------------------------------------------------------------
    @property
    def terms(self) -> dict[Key, LaurentPoly]:
        return dict(self._t)

    def __bool__(self):
        return bool(self._t)

    def order(self, var: str = "n") -> int:
        i = self.variables.index(var)
        return max((k[1][i] for k in self._t), default=-1)

    def free_of_q(self, var: str) -> bool:
        """True when no Q_var appears (the operator is var-free)."""
        i = self.variables.index(var)
        return all(k[0][i] == 0 for k in self._t)

    def coeffs(self) -> list[CoeffPoly]:
        """Single-variable operator as coefficients of E^0..E^d in (q, Q)."""
        if self.variables != ("n",):
            raise ValueError("coeffs() needs a single-variable operator in n")
        d = self.order()
        out = [CoeffPoly.const(0, ("Q",)) for _ in range(d + 1)]
        for (qa, eb), c in self._t.items():
            out[eb[0]] = out[eb[0]] + CoeffPoly({(e, qa[0]): v for e, v in c.terms.items()}, ("Q",))
        return out

    def _lift(self, other) -> "WeylOperator":
        if isinstance(other, WeylOperator):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch {self.variables} vs {other.variables}")
            return other
        return WeylOperator.const(other, self.variables)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        t = dict(self._t)
        for k, c in other._t.items():
            t[k] = t[k] + c if k in t else c
        return WeylOperator(t, self.variables)

    __radd__ = __add__

    def __neg__(self):
        return WeylOperator({k: -c for k, c in self._t.items()}, self.variables)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        t: dict[Key, LaurentPoly] = {}
        for (a1, b1), c1 in self._t.items():
            for (a2, b2), c2 in other._t.items():
                # E^b Q^c = q^{bc} Q^c E^b, per variable
                twist = 4 * sum(x * y for x, y in zip(b1, a2))
                k = (tuple(x + y for x, y in zip(a1, a2)), tuple(x + y for x, y in zip(b1, b2)))
                v = (c1 * c2).shift(twist)
                t[k] = t[k] + v if k in t else v
        return WeylOperator(t, self.variables)

    def __rmul__(self, other):
        return self._lift(other) * self

    def __pow__(self, k: int):
        if k < 0:
            if len(self._t) == 1:
                ((a, b), c), = self._t.items()
                if not any(b) and c.is_monomial():
                    return WeylOperator({(tuple(x * k for x in a), b): c ** k}, self.variables)
            raise ValueError("only Q-monomials can be inverted")
        out = WeylOperator.const(1, self.variables)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, WeylOperator):
            try:
                other = self._lift(other)
            except (ValueError, TypeError):
                return NotImplemented
        return self.variables == other.variables and self._t == other._t

    def __hash__(self):
        return hash((self.variables, frozenset(self._t.items())))

    # action -----------------------------------------------------------------
    def apply(self, f: Callable[..., RatFunc | LaurentPoly], *point: int) -> RatFunc:
        """(self f)(point) for f a function of the operator's variables."""
        if len(point) != len(self.variables):
            raise ValueError(f"need {len(self.variables)} coordinates")
        acc = RatFunc(0)
        for (a, b), c in self._t.items():
            x = [p + s for p, s in zip(point, b)]
            val = f(*x)
            if not val:
                continue
            e = 4 * sum(ai * p for ai, p in zip(a, point))
            acc = acc + RatFunc.of(val) * c.shift(e)
        return acc

    # text -------------------------------------------------------------------
    def __str__(self):
        if not self._t:
            return "0"
        groups: dict[tuple, dict] = {}
        for (a, b), c in self._t.items():
            g = groups.setdefault(b, {})
            for e, v in c.terms.items():
                g[(e,) + a] = v
        gens = tuple(_q_name(x) for x in self.variables)
        parts = []
        for b in sorted(groups, reverse=True):
            poly = CoeffPoly(groups[b], gens)
            shift = "*".join(
                (_e_name(x) if k == 1 else f"{_e_name(x)}^{k}") for x, k in zip(self.variables, b) if k
            )
            ps = str(poly)
            if not shift:
                parts.append(ps)
            elif ps == "1":
                parts.append(shift)
            elif ps == "-1":
                parts.append("-" + shift)
            elif len(poly) == 1 and not ps.startswith("("):
                parts.append(f"{ps}*{shift}")
            else:
                parts.append(f"({ps})*{shift}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") and not p.startswith("-(") else f" + {p}"
        return out

    def __repr__(self):
        return f"WeylOperator({str(self)!r})"

    @classmethod
    def parse(cls, text: str, variables: Sequence[str] = ("n",)) -> "WeylOperator":
        """Parse e.g. "(q^2 - Q) E^2 + (1+q-Q+Q^2) E + q Q^3"."""
        variables = tuple(variables)
        table: dict[str, Callable] = {}
        for name, fn in _LAURENT_SYMBOLS.items():
            table[name] = (lambda f: lambda e: WeylOperator.const(f(e), variables))(fn)
        for x in variables:
            def qgen(e, x=x):
                if e.denominator != 1:
                    raise ParseError(f"fractional power of {_q_name(x)}")
                return WeylOperator.Q(x, int(e), variables)

            def egen(e, x=x):
                if e.denominator != 1 or e < 0:
                    raise ParseError(f"{_e_name(x)} takes nonnegative integer powers")
                return WeylOperator.E(x, int(e), variables)

            table[_q_name(x)] = qgen
            table[_e_name(x)] = egen
        val = parse_expression(text, table, WeylOperator.const(1, variables))
        if not isinstance(val, WeylOperator):
            val = WeylOperator.const(val if not isinstance(val, Fraction) else LaurentPoly(val), variables)
        return val


def op_mul(a: WeylOperator, b: WeylOperator) -> WeylOperator:
    return a * b


def op_apply(a: WeylOperator, f, n: int, *rest: int) -> RatFunc:
    """(a f)(n, ...) where f is a callable or a mapping n -> value."""
    if not callable(f):
        seq = f

        def f(*x):
            if x[0] not in seq:
                raise KeyError(f"sequence undefined at n={x[0]}")
            return seq[x[0]]

    return a.apply(f, n, *rest)
