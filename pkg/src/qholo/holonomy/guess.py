"""Guess-and-verify search for homogeneous recurrences of exact sequences.

An ansatz sum_{i<=d, j<=D} c_ij(q) q^{jn} f(n+i) = 0 is made with every
c_ij a polynomial in q of degree <= L times a fixed u-power offset o_i.
Writing c_ij = sum_l c_ijl q^l gives a linear system over Q in the
integers c_ijl.  Rows come from evaluating each sample relation at
random points u = x modulo a prime, so a handful of sample n suffice even
when (d+1)(D+1) exceeds their number.  A kernel found modulo primes is
lifted by CRT and rational reconstruction, then every candidate is
checked exactly on the fitting points and on held-out points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import flint
import numpy as np

from ..qring import CoeffPoly, LaurentPoly, RatFunc
from ..qring.linalg import PRIMES, rational_reconstruct, crt_pair
from .recurrence import GENS, Recurrence, Sequence

DEFAULT_HOLDOUT = 10
DEFAULT_MAX_Q_DEGREE = 32  # cap on the q-degree L of each coefficient


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class _Layout:
    order: int
    qdeg: int  # D, degree in Q
    span: int  # L, degree in q (in units of ``step``)
    step: int  # u-exponent step of the coefficient polynomials
    offsets: tuple[int, ...]  # u-offset o_i of coefficient i

    @property
    def unknowns(self) -> list[tuple[int, int, int]]:
        return [(i, j, l) for i in range(self.order + 1) for j in range(self.qdeg + 1) for l in range(self.span + 1)]

    def exponent(self, i: int, j: int, l: int, n: int) -> int:
        return self.step * l + self.offsets[i] + 4 * j * n


def _residue(v: RatFunc) -> int | None:
    """Common residue mod 4 of the u-exponents of v, if there is one."""
    exps = [e for e in v.num.terms] + [e for e in v.den.terms]
    if not exps:
        return None
    rs = {e % 4 for e in v.num.terms}
    rd = {e % 4 for e in v.den.terms}
    if len(rs) != 1 or len(rd) != 1:
        return None
    return (rs.pop() - rd.pop()) % 4


def _offsets(f: Sequence, ns: list[int], order: int) -> tuple[int, tuple[int, ...]]:
    """(step, offsets) such that every term of the ansatz lands in one residue class.

    Falls back to u-steps with no offsets when the values are not
    concentrated in single residue classes.
    """
    res = {}
    for n in range(ns[0], ns[-1] + order + 1):
        v = f[n]
        if v:
            r = _residue(v)
            if r is None:
                return 1, (0,) * (order + 1)
            res[n] = r
    offs = []
    for i in range(order + 1):
        cand = {(res[n] - res[n + i]) % 4 for n in ns if n in res and n + i in res}
        if len(cand) > 1:
            return 1, (0,) * (order + 1)
        offs.append(cand.pop() if cand else 0)
    return 4, tuple(offs)


class _Evaluator:
    """Residues of f(n) at u = x modulo p; each value is converted to a
    pair of flint polynomials once."""

    def __init__(self, f: Sequence, p: int):
        self.f = f
        self.p = p
        self.polys: dict = {}
        self.cache: dict = {}

    def _poly(self, lp: LaurentPoly):
        terms = lp.terms
        lo = min(terms)
        coeffs = [0] * (max(terms) - lo + 1)
        for e, c in terms.items():
            c = Fraction(c)
            coeffs[e - lo] = c.numerator * pow(c.denominator, -1, self.p) % self.p
        return flint.nmod_poly(coeffs, self.p), lo

    def __call__(self, n: int, x: int) -> int | None:
        key = (n, x)
        if key in self.cache:
            return self.cache[key]
        if n not in self.polys:
            v = self.f[n]
            self.polys[n] = None if not v else (self._poly(v.num), self._poly(v.den))
        pair = self.polys[n]
        if pair is None:
            out = 0
        else:
            p = self.p
            (num, nlo), (den, dlo) = pair
            dv = int(den(x))
            if dv == 0:
                out = None
            else:
                out = int(num(x)) * pow(dv, -1, p) * pow(x, nlo - dlo, p) % p
        self.cache[key] = out
        return out


_EVALUATORS: dict = {}


def _evaluator(f: Sequence, p: int) -> _Evaluator:
    key = (id(f), p)
    ev = _EVALUATORS.get(key)
    if ev is None or ev.f is not f:
        ev = _EVALUATORS[key] = _Evaluator(f, p)
    return ev


def _row_caps(layout: _Layout, f: Sequence, ns: list[int]) -> dict[int, int]:
    """Independent equations available at each n: the number of u-powers
    the relation at n can occupy, counted in steps of ``layout.step``."""
    caps = {}
    for n in ns:
        his, los = [], []
        for i in range(layout.order + 1):
            v = f[n + i]
            if not v:
                continue
            exps = list(v.num.terms)
            dexp = list(v.den.terms)
            his.append(max(exps) - min(dexp) + layout.offsets[i])
            los.append(min(exps) - max(dexp) + layout.offsets[i])
        if not his:
            caps[n] = 0
            continue
        width = max(his) - min(los) + layout.step * layout.span + 4 * layout.qdeg * abs(n)
        caps[n] = width // layout.step + 1
    return caps


def _points(seed: int, p: int, caps: dict[int, int], count: int) -> list[tuple[int, int]]:
    """Round-robin sample points (n, x), at most caps[n] per n."""
    rng = random.Random(seed * 1000003 + p)
    pts = []
    used = dict.fromkeys(caps, 0)
    while len(pts) < count:
        progress = False
        for n in caps:
            if used[n] < caps[n]:
                pts.append((n, rng.randrange(2, p - 1)))
                used[n] += 1
                progress = True
                if len(pts) == count:
                    break
        if not progress:
            break
    return pts


def determined(layout: _Layout, f: Sequence, ns: list[int]) -> bool:
    """Whether the sample points can pin down the kernel of this cell."""
    return sum(_row_caps(layout, f, ns).values()) >= len(layout.unknowns) + 1


def _powers(x: int, step: int, count: int, p: int) -> np.ndarray:
    out = np.empty(count, dtype=np.int64)
    acc = 1
    xs = pow(x, step, p)
    for l in range(count):
        out[l] = acc
        acc = acc * xs % p
    return out


def _matrix(layout: _Layout, ev: _Evaluator, pts: list[tuple[int, int]]):
    """Sampled system mod p; columns ordered as ``layout.unknowns``."""
    p = ev.p
    d, D, L = layout.order, layout.qdeg, layout.span
    blocks = []
    for n, x in pts:
        vals = [ev(n + i, x) for i in range(d + 1)]
        if any(v is None for v in vals):
            continue
        lpow = _powers(x, layout.step, L + 1, p)
        qn = pow(x, 4 * n, p) if n >= 0 else pow(pow(x, -1, p), -4 * n, p)
        jpow = _powers(qn, 1, D + 1, p)
        # (j, l) block: x^{4jn} * x^{step*l}, then per i: * x^{o_i} * f(n+i)
        jl = (jpow[:, None] * lpow[None, :]) % p
        row = []
        for i in range(d + 1):
            scale = pow(x, layout.offsets[i], p) * vals[i] % p
            row.append((jl * scale % p).ravel())
        blocks.append(np.concatenate(row))
    if not blocks:
        return flint.nmod_mat(0, len(layout.unknowns), [], p)
    M = np.vstack(blocks)
    return flint.nmod_mat(M.shape[0], M.shape[1], M.ravel().tolist(), p)


def _kernel_mod(layout: _Layout, f: Sequence, ns: list[int], p: int, seed: int) -> list[list[int]]:
    """Canonical (reduced echelon) kernel basis of the sampled system mod p."""
    ncols = len(layout.unknowns)
    ev = _evaluator(f, p)
    M = _matrix(layout, ev, _points(seed, p, _row_caps(layout, f, ns), ncols + 12))
    X, nullity = M.nullspace()
    if nullity == 0:
        return []
    K = X.transpose()
    R, rank = K.rref()
    ent = [int(e) for e in R.entries()]
    return [ent[r * ncols : (r + 1) * ncols] for r in range(rank)]


def _has_kernel(layout: _Layout, f: Sequence, ns: list[int], seed: int) -> bool:
    ncols = len(layout.unknowns)
    ev = _evaluator(f, PRIMES[0])
    M = _matrix(layout, ev, _points(seed, PRIMES[0], _row_caps(layout, f, ns), ncols + 12))
    return M.rank() < ncols


def _to_recurrence(layout: _Layout, vec: list[Fraction], label: str) -> Recurrence | None:
    coeffs = [dict() for _ in range(layout.order + 1)]
    for (i, j, l), c in zip(layout.unknowns, vec):
        if c:
            coeffs[i][(layout.step * l + layout.offsets[i], j)] = c
    if not coeffs[-1]:
        return None
    polys = tuple(CoeffPoly(t, GENS) for t in coeffs)
    return Recurrence(polys, provenance="guessed", label=label).normalized()


def _lift(layout: _Layout, f: Sequence, ns: list[int], check_ns: list[int], seed: int, label: str) -> Recurrence | None:
    """First kernel vector lifted to Q and verified exactly on ``check_ns``."""
    acc = None
    mod = 1
    last = None
    for p in PRIMES:
        basis = _kernel_mod(layout, f, ns, p, seed)
        if not basis:
            return None
        vec = basis[0]
        if acc is None:
            acc, mod = list(vec), p
        else:
            pairs = [crt_pair(a, mod, b, p) for a, b in zip(acc, vec)]
            acc = [x for x, _ in pairs]
            mod = pairs[0][1]
        cand = [rational_reconstruct(x, mod) for x in acc]
        if any(c is None for c in cand):
            continue
        if cand != last:
            last = cand
            continue
        rec = _to_recurrence(layout, cand, label)
        if rec is not None and all(rec.holds_at(f, n) for n in check_ns):
            return rec
        # a stable lift that fails exact checking overfits the sample
        return None
    return None


def _cell(f: Sequence, ns: list[int], order: int, qdeg: int, max_span: int, seed: int):
    step, offs = _offsets(f, ns, order)
    scale = 4 // step
    cap = max_span * scale
    lo, hi = 0, None
    span = min(4 * scale, cap)
    # doubling search for the smallest span with a kernel, then bisection
    while True:
        layout = _Layout(order, qdeg, span, step, offs)
        if not determined(layout, f, ns):
            raise InsufficientData(f"too few sample values to decide order {order}, Q-degree {qdeg}")
        if _has_kernel(layout, f, ns, seed):
            hi = span
            break
        lo = span + 1
        if span == cap:
            return None
        span = min(2 * span, cap)
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_kernel(_Layout(order, qdeg, mid, step, offs), f, ns, seed):
            hi = mid
        else:
            lo = mid + 1
    return _Layout(order, qdeg, lo, step, offs)


def guess_recurrence(
    f: Sequence,
    max_order: int = 4,
    max_degree: int = 8,
    holdout: int = DEFAULT_HOLDOUT,
    min_order: int = 1,
    max_q_degree: int = DEFAULT_MAX_Q_DEGREE,
    seed: int = 0,
    label: str = "",
) -> Recurrence | None:
    """Smallest (order, Q-degree) homogeneous recurrence annihilating f.

    The last ``holdout`` values are never used for fitting; a candidate is
    returned only if it holds exactly at every fitting point and every
    held-out point.  Returns None when no cell within the caps has a
    solution.
    """
    lo, hi = f.start, f.stop
    for d in range(min_order, max_order + 1):
        fit = list(range(lo, hi - d - holdout))
        held = list(range(hi - d - holdout, hi - d))
        if len(fit) < 2:
            if d == min_order:
                raise InsufficientData(f"{hi - lo} values leave no fitting points at order {d} with {holdout} held out")
            break
        for D in range(max_degree + 1):
            layout = _cell(f, fit, d, D, max_q_degree, seed)
            if layout is None:
                continue
            rec = _lift(layout, f, fit, fit + held, seed, label)
            if rec is not None:
                return _with_range(rec, fit[0], held[-1] if held else fit[-1])
    return None


def _with_range(rec: Recurrence, a: int, b: int) -> Recurrence:
    from dataclasses import replace

    return replace(rec, verified_range=(a, b))


def no_recurrence_below(f: Sequence, order: int, max_degree: int = 8, **kw) -> bool:
    """True when the guesser finds nothing of order < ``order`` within the caps."""
    if order <= 1:
        return True
    return guess_recurrence(f, max_order=order - 1, max_degree=max_degree, **kw) is None
