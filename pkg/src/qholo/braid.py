"""Braid words, their closures, and the angle-variable labeling of the long knot."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

PRESETS = {
    "unknot": "[1]",
    "trefoil": "[1,1,1]",
    "figure8": "[1,-2,1,-2]",
}


class BraidParseError(ValueError):
    pass


@dataclass(frozen=True)
class BraidWord:
    """Word in the generators sigma_1..sigma_{m-1}; a letter +i / -i is sigma_i^{+-1}."""

    strands: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError("a braid needs at least one strand")
        for x in self.letters:
            if x == 0 or abs(x) >= self.strands:
                raise ValueError(f"generator {x} out of range for {self.strands} strands")

    @property
    def crossings(self) -> int:
        return len(self.letters)

    def signs(self) -> list[int]:
        return [1 if x > 0 else -1 for x in self.letters]

    def writhe(self) -> int:
        return sum(self.signs())

    def mirror(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-x for x in self.letters))

    def __str__(self):
        return "[" + ",".join(str(x) for x in self.letters) + "]"


def parse_braid(text: str, strands: int | None = None) -> BraidWord:
    """Parse "[1,-2,1,-2]" (or a preset name) into a BraidWord.

    The strand count defaults to max|index| + 1.

    >>> parse_braid("[1,1,1]")
    BraidWord(strands=2, letters=(1, 1, 1))
    """
    text = text.strip()
    if text in PRESETS:
        text = PRESETS[text]
    m = re.fullmatch(r"\[\s*(.*?)\s*\]", text)
    if m is None:
        raise BraidParseError(f"braid word must be bracketed, got {text!r}")
    body = m.group(1)
    letters: list[int] = []
    if body:
        for tok in body.split(","):
            tok = tok.strip()
            if not re.fullmatch(r"[+-]?\d+", tok):
                raise BraidParseError(f"malformed generator token {tok!r}")
            x = int(tok)
            if x == 0:
                raise BraidParseError("generator index zero is invalid")
            letters.append(x)
    need = max((abs(x) for x in letters), default=0) + 1
    if strands is None:
        strands = need
    elif strands < need:
        raise BraidParseError(f"generator {need - 1} needs at least {need} strands, got {strands}")
    return BraidWord(strands, tuple(letters))


@dataclass(frozen=True)
class ClosureInfo:
    permutation: tuple[int, ...]  # bottom position p (1-based) ends at top position permutation[p-1]
    cycles: tuple[tuple[int, ...], ...]
    writhe: int

    @property
    def components(self) -> int:
        return len(self.cycles)


def closure_info(b: BraidWord) -> ClosureInfo:
    pos = list(range(1, b.strands + 1))  # pos[s] = current position of the strand that started at s+1
    where = {p: p for p in pos}  # position -> starting strand
    for x in b.letters:
        i = abs(x)
        where[i], where[i + 1] = where[i + 1], where[i]
    perm = [0] * b.strands
    for top, start in where.items():
        perm[start - 1] = top
    seen = set()
    cycles = []
    for s in range(1, b.strands + 1):
        if s in seen:
            continue
        cyc = []
        p = s
        while p not in seen:
            seen.add(p)
            cyc.append(p)
            p = perm[p - 1]
        cycles.append(tuple(cyc))
    return ClosureInfo(tuple(perm), tuple(cycles), b.writhe())


@dataclass(frozen=True)
class LinearForm:
    """constant + sum_j coeffs[j] * k_j with crossing indices j starting at 1."""

    constant: int = 0
    coeffs: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def make(constant: int = 0, coeffs: Mapping[int, int] | None = None) -> "LinearForm":
        items = tuple(sorted((j, c) for j, c in (coeffs or {}).items() if c))
        return LinearForm(constant, items)

    @staticmethod
    def var(j: int) -> "LinearForm":
        return LinearForm(0, ((j, 1),))

    def as_dict(self) -> dict[int, int]:
        return dict(self.coeffs)

    def __add__(self, other: "LinearForm | int") -> "LinearForm":
        if isinstance(other, int):
            return LinearForm(self.constant + other, self.coeffs)
        d = self.as_dict()
        for j, c in other.coeffs:
            d[j] = d.get(j, 0) + c
        return LinearForm.make(self.constant + other.constant, d)

    __radd__ = __add__

    def __neg__(self) -> "LinearForm":
        return LinearForm(-self.constant, tuple((j, -c) for j, c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: int) -> "LinearForm":
        return LinearForm.make(self.constant * s, {j: c * s for j, c in self.coeffs})

    def __call__(self, k: Sequence[int]) -> int:
        """Evaluate at k = (k_1, ..., k_c)."""
        return self.constant + sum(c * k[j - 1] for j, c in self.coeffs)

    def is_zero(self) -> bool:
        return self.constant == 0 and not self.coeffs

    def __str__(self):
        parts = []
        for j, c in self.coeffs:
            mono = f"k{j}"
            if c == 1:
                parts.append(f"+ {mono}")
            elif c == -1:
                parts.append(f"- {mono}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {abs(c)}*{mono}")
        if self.constant or not parts:
            parts.append(f"{'+' if self.constant >= 0 else '-'} {abs(self.constant)}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


@dataclass
class CrossingLabels:
    """Labels of every part-arc of a long knot given as a braid closure.

    ``levels[t][p-1]`` is the label on position p between letters t and
    t+1 (level 0 is the bottom, level c the top); the closure identifies
    the top and bottom levels.  Crossing j has left input x[j-1] (position
    i), right input y[j-1] (position i+1) and sign signs[j-1].
    """

    word: BraidWord
    signs: list[int]
    x: list[LinearForm]
    y: list[LinearForm]
    levels: list[list[LinearForm]]
    start: int = 1
    order: list[tuple[int, str]] = field(default_factory=list)  # walk: (crossing, "left"/"right")

    @property
    def top(self) -> list[LinearForm]:
        """b_i: top label of position i (equal to its bottom label)."""
        return self.levels[-1]

    def outputs(self, j: int) -> tuple[LinearForm, LinearForm]:
        """(c, d): labels leaving crossing j at positions i and i+1."""
        i = abs(self.word.letters[j - 1])
        return self.levels[j][i - 1], self.levels[j][i]

    def substitute(self, k: Sequence[int]) -> list[list[int]]:
        return [[f(k) for f in lev] for lev in self.levels]


def label_long_knot(b: BraidWord, start: int = 1) -> CrossingLabels:
    """Walk the closed diagram from the bottom of ``start`` with label 0.

    Passing crossing j (sign e) as its left input lowers the label by
    e*k_j; passing it as the right input raises it by e*k_j.  So with
    inputs (a, b) and outputs (c, d) every crossing satisfies
    c - b = a - d = e*k_j, the support pattern of the braiding matrices.
    """
    info = closure_info(b)
    if info.components != 1:
        raise ValueError(f"closure of {b} has {info.components} components; a knot is required")
    c = b.crossings
    m = b.strands
    levels: list[list[LinearForm | None]] = [[None] * m for _ in range(c + 1)]
    x: list[LinearForm | None] = [None] * c
    y: list[LinearForm | None] = [None] * c
    order = []
    signs = b.signs()
    pos = start
    label = LinearForm()
    for _ in range(m):
        levels[0][pos - 1] = label
        for j, letter in enumerate(b.letters, start=1):
            i = abs(letter)
            e = signs[j - 1]
            if pos == i:
                x[j - 1] = label
                label = label - LinearForm.var(j).scale(e)
                pos = i + 1
                order.append((j, "left"))
            elif pos == i + 1:
                y[j - 1] = label
                label = label + LinearForm.var(j).scale(e)
                pos = i
                order.append((j, "right"))
            levels[j][pos - 1] = label
        # closure: top position pos continues at bottom position pos
        levels[c][pos - 1] = label
    if pos != start or not label.is_zero():
        raise AssertionError("walk did not close up consistently")
    return CrossingLabels(b, signs, x, y, levels, start, order)


def check_labels(labels: CrossingLabels, k: Sequence[int]) -> bool:
    """Independent check of both crossing relations after substituting k."""
    lev = labels.substitute(k)
    if lev[0] != lev[-1]:
        return False
    for j, letter in enumerate(labels.word.letters, start=1):
        i = abs(letter)
        e = labels.signs[j - 1]
        a, bb = lev[j - 1][i - 1], lev[j - 1][i]
        cc, d = lev[j][i - 1], lev[j][i]
        if cc - bb != e * k[j - 1] or a - d != e * k[j - 1]:
            return False
        for p in range(len(lev[j])):
            if p not in (i - 1, i) and lev[j][p] != lev[j - 1][p]:
                return False
    return True
