"""Cyclotomic expansion J(n) = sum_k C(k) S(n, k) of zero-framed colored Jones functions."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .hyper import multisum, twist_summand
from .qring import LaurentPoly, RatFunc
from .qspecial import cyc_R, cyc_S

PROVENANCES = ("from-transform", "from-closed-form")

# Twist knots with a braid presentation, by twist parameter.  The closed
# forms c(p, n) agree with the unmirrored zero-framed state sums of these words.
TWIST_BRAIDS = {
    -1: "[1,-2,1,-2]",
    0: "[1]",
    1: "[1,1,1]",
    2: "[1,1,1,2,-1,2]",
}

# C(k) = c(p, k + ALIGNMENT_SHIFT); chosen by ``choose_alignment`` and
# recorded here (the shift -1 is the one that satisfies the expansion).
ALIGNMENT_SHIFT = -1


class InsufficientJones(ValueError):
    pass


@dataclass(frozen=True)
class CycloSeq:
    values: Mapping[int, RatFunc]
    provenance: str = "from-transform"
    label: str = ""

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "values", {n: RatFunc.of(v) for n, v in sorted(self.values.items())})

    def __getitem__(self, n: int) -> RatFunc:
        return self.values[n]

    def __contains__(self, n: int) -> bool:
        return n in self.values

    def range(self) -> list[int]:
        return sorted(self.values)

    def to_json(self) -> dict:
        checks = integrality_check(self)
        return {
            "label": self.label,
            "provenance": self.provenance,
            "values": [[n, str(v), checks[n]] for n, v in self.values.items()],
        }


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("QHOLO_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn: Callable[[int], RatFunc], ns: list[int]) -> list[RatFunc]:
    w = _workers()
    if w > 1 and len(ns) > 1:
        with ThreadPoolExecutor(w) as ex:
            return list(ex.map(fn, ns))
    return [fn(n) for n in ns]


def jones_to_cyclotomic(J: Mapping[int, LaurentPoly | RatFunc], N: int | Iterable[int], label: str = "") -> CycloSeq:
    """C(n) = sum_{k<=n} R(n, k) J(k) for the zero-framed J with J(unknot) = [n]."""
    ns = list(range(1, N + 1)) if isinstance(N, int) else sorted(N)
    need = max(ns, default=0)
    missing = [k for k in range(1, need + 1) if k not in J]
    if missing:
        raise InsufficientJones(f"J is missing at n = {missing[:5]}")

    def one(n: int) -> RatFunc:
        acc = RatFunc(0)
        for k in range(1, n + 1):
            acc = acc + cyc_R(n, k) * J[k]
        return acc

    return CycloSeq(dict(zip(ns, _map(one, ns))), "from-transform", label)


def cyclotomic_to_jones(C: CycloSeq | Mapping[int, RatFunc], n: int) -> RatFunc:
    """J(n) = sum_{k=1}^{n} C(k) S(n, k); S(n, k) vanishes for k > n."""
    vals = C.values if isinstance(C, CycloSeq) else C
    acc = RatFunc(0)
    for k in range(1, n + 1):
        if k not in vals:
            raise InsufficientJones(f"C is missing at k = {k}")
        c = vals[k]
        if c:
            acc = acc + RatFunc.of(c) * cyc_S(n, k)
    return acc


def integrality_check(C: CycloSeq | Mapping[int, RatFunc]) -> dict[int, bool]:
    """Per n: the value lies in Z[q^{+-1}]."""
    vals = C.values if isinstance(C, CycloSeq) else C
    return {n: RatFunc.of(v).is_integral_laurent() for n, v in vals.items()}


def twist_values(p: int, ns: Iterable[int]) -> dict[int, RatFunc]:
    """c(p, n) by summing the twist-knot summand."""
    t = twist_summand(p)
    return {n: multisum(t, n) for n in ns}


def choose_alignment(J: Mapping[int, LaurentPoly], closed: Callable[[Iterable[int]], Mapping[int, RatFunc]], upto: int = 5) -> int:
    """Shift s with C(k) = c(k + s) satisfying J(n) = sum C(k) S(n, k) for n <= upto.

    Tries s = -1 first, then s = 0; raises if neither works.
    """
    for s in (-1, 0):
        vals = closed(range(1 + s, upto + 1 + s))
        C = {k: vals[k + s] for k in range(1, upto + 1)}
        if all(cyclotomic_to_jones(C, n) == RatFunc.of(J[n]) for n in range(1, upto + 1)):
            return s
    raise ValueError("no index alignment reproduces the colored Jones values")


def twist_cyclotomic(p: int, N: int, shift: int = ALIGNMENT_SHIFT) -> CycloSeq:
    """C(k) = c(p, k + shift) for 1 <= k <= N from the closed form."""
    vals = twist_values(p, range(1 + shift, N + 1 + shift))
    return CycloSeq({k: vals[k + shift] for k in range(1, N + 1)}, "from-closed-form", f"twist:{p}")
