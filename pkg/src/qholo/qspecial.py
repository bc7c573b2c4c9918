"""Quantum integers, factorials, binomials, Pochhammer symbols and the
knot-independent kernels of the cyclotomic expansion.

Everything is evaluated at concrete integers; results are LaurentPoly in
u = q^{1/4} (v = q^{1/2} = u^2), or RatFunc where a genuine quotient occurs.
"""

from __future__ import annotations

from functools import lru_cache

from .qring import LaurentPoly, NotDivisibleError, RatFunc


@lru_cache(maxsize=None)
def brace(n: int) -> LaurentPoly:
    """{n} = v^n - v^{-n}."""
    if n == 0:
        return LaurentPoly()
    return LaurentPoly({2 * n: 1, -2 * n: -1})


@lru_cache(maxsize=None)
def qint(n: int) -> LaurentPoly:
    """[n] = {n}/{1} = v^{n-1} + v^{n-3} + ... + v^{1-n}; [-n] = -[n]."""
    if n == 0:
        return LaurentPoly()
    if n < 0:
        return -qint(-n)
    return LaurentPoly({2 * (n - 1 - 2 * i): 1 for i in range(n)})


@lru_cache(maxsize=None)
def qfact(n: int) -> LaurentPoly:
    """[n]! = [1][2]...[n]."""
    if n < 0:
        raise ValueError("quantum factorial of a negative integer")
    out = LaurentPoly(1)
    for i in range(2, n + 1):
        out = out * qint(i)
    return out


@lru_cache(maxsize=None)
def brace_fact(n: int) -> LaurentPoly:
    """{n}! = {1}{2}...{n}."""
    if n < 0:
        raise ValueError("brace factorial of a negative integer")
    out = LaurentPoly(1)
    for i in range(1, n + 1):
        out = out * brace(i)
    return out


@lru_cache(maxsize=None)
def brace_falling(n: int, k: int) -> LaurentPoly:
    """{n}_k = {n}{n-1}...{n-k+1} for k >= 0, and 0 for k < 0."""
    if k < 0:
        return LaurentPoly()
    out = LaurentPoly(1)
    for i in range(1, k + 1):
        out = out * brace(n - i + 1)
        if not out:
            break
    return out


@lru_cache(maxsize=None)
def qbinom(n: int, k: int) -> LaurentPoly:
    """{n}_k / {k}_k, which is 0 for k < 0.

    For n < 0 this is still a Laurent polynomial ((-1)^k times the
    binomial of k-n-1 over k); a non-exact quotient raises.
    """
    if k < 0:
        return LaurentPoly()
    if k == 0:
        return LaurentPoly(1)
    try:
        return brace_falling(n, k).exact_div(brace_falling(k, k))
    except NotDivisibleError as exc:
        raise NotDivisibleError(f"q-binomial ({n} over {k}) is not a Laurent polynomial") from exc


def pochhammer(base: LaurentPoly, step: LaurentPoly, count: int) -> LaurentPoly:
    """prod_{i=0}^{count-1} (1 - base * step^i)."""
    if count < 0:
        raise ValueError("Pochhammer symbol with negative count")
    if not base.is_monomial() or not step.is_monomial():
        raise ValueError("Pochhammer base and step must be monomials")
    out = LaurentPoly(1)
    term = base
    for _ in range(count):
        out = out * (1 - term)
        if not out:
            break
        term = term * step
    return out


def qpoch(exp_u: int, step_u: int, count: int) -> LaurentPoly:
    """pochhammer(u^exp_u, u^step_u, count)."""
    return pochhammer(LaurentPoly.u(exp_u), LaurentPoly.u(step_u), count)


@lru_cache(maxsize=None)
def cyc_S(n: int, k: int) -> LaurentPoly:
    """S(n,k) = {n+k-1}_{2k-1} / (v - v^{-1})."""
    if n < 1 or k < 1:
        raise ValueError(f"cyc_S needs n, k >= 1, got ({n}, {k})")
    return brace_falling(n + k - 1, 2 * k - 1).exact_div(brace(1))


@lru_cache(maxsize=None)
def cyc_R(n: int, k: int) -> RatFunc:
    """R(n,k) = (-1)^{n-k} {2k} / ({2n-1}! [2n]) * qbinom(2n, n-k); zero for k > n."""
    if n < 1:
        raise ValueError(f"cyc_R needs n >= 1, got {n}")
    if k > n:
        return RatFunc(0)
    num = brace(2 * k) * qbinom(2 * n, n - k)
    if (n - k) % 2:
        num = -num
    return RatFunc(num, brace_fact(2 * n - 1) * qint(2 * n))


def delta(n: int, k: int) -> int:
    return int(n == k)
