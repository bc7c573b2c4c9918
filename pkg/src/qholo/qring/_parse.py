"""Tiny recursive-descent parser for polynomial-like expressions.

The grammar covers everything the text formats of this package emit::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'|'/'] factor | factor)*      # juxtaposition multiplies
    factor := atom ['^' exponent]
    atom   := NUMBER | NAME | '(' expr ')'
    exponent := INT | '-' INT | '(' ['-'] INT ['/' INT] ')'

Names are resolved through a caller-supplied table mapping a symbol to a
function of its (rational) exponent, so ``q^(1/2)`` can be handled by the
caller without the parser knowing about fourth roots.  Division by a
non-number is delegated to the values, so a caller whose algebra has no
field of fractions gets whatever ``/`` returns there.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Callable, Mapping

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        elif op is not None and not op.isspace():
            if op not in "+-*/^()":
                raise ParseError(f"unexpected character {op!r} in {text!r}")
            out.append(("op", op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, symbols: Mapping[str, Callable[[Fraction], Any]], one: Any):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.symbols = symbols
        self.one = one

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind} at token {self.i} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        if not self.toks:
            raise ParseError("empty expression")
        val = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at token {self.i} in {self.text!r}")
        return val

    def expr(self):
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        val = self.term()
        if sign < 0:
            val = -val
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                val = val * self.factor()
            elif tok == ("op", "/"):
                self.take()
                den = self.factor()
                if den == 0:
                    raise ParseError("division by zero")
                if isinstance(den, (int, Fraction)):
                    val = val * (Fraction(1) / den)
                else:
                    val = val / den
            elif tok[0] in ("num", "name") or tok == ("op", "("):
                val = val * self.factor()
            else:
                return val

    def exponent(self) -> Fraction:
        tok = self.peek()
        if tok == ("op", "("):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            num = int(self.take("num")[1])
            den = 1
            if self.peek() == ("op", "/"):
                self.take()
                den = int(self.take("num")[1])
            self.take("op", ")")
            return Fraction(sign * num, den)
        sign = 1
        if tok == ("op", "-"):
            self.take()
            sign = -1
        return Fraction(sign * int(self.take("num")[1]))

    def factor(self):
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            base = int(tok[1])
            if self.peek() == ("op", "^"):
                self.take()
                e = self.exponent()
                if e.denominator != 1:
                    raise ParseError("fractional power of a number")
                return Fraction(base) ** int(e)
            return base
        if tok[0] == "name":
            self.take()
            if tok[1] not in self.symbols:
                raise ParseError(f"unknown symbol {tok[1]!r} in {self.text!r}")
            e = Fraction(1)
            if self.peek() == ("op", "^"):
                self.take()
                e = self.exponent()
            return self.symbols[tok[1]](e)
        if tok == ("op", "("):
            self.take()
            val = self.expr()
            self.take("op", ")")
            if self.peek() == ("op", "^"):
                self.take()
                e = self.exponent()
                if e.denominator != 1 or e < 0:
                    raise ParseError("parenthesised groups take nonnegative integer powers")
                out = self.one
                for _ in range(int(e)):
                    out = out * val
                return out
            return val
        raise ParseError(f"unexpected token {tok[1]!r} in {self.text!r}")


def parse_expression(text: str, symbols: Mapping[str, Callable[[Fraction], Any]], one: Any) -> Any:
    """Parse ``text`` into whatever algebra ``symbols`` produces."""
    return _Parser(text, symbols, one).parse()
