from __future__ import annotations

import random
from fractions import Fraction

import pytest

from qholo.qring import (
    CoeffPoly,
    LaurentPoly,
    NotDivisibleError,
    ParseError,
    RatFunc,
    solve_linear,
)

L = LaurentPoly
q, v, u = L.q(), L.v(), L.u()


def random_laurent(rng: random.Random, terms: int = 4) -> LaurentPoly:
    return L({rng.randint(-8, 8): Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(terms)})


def test_u_cubed_times_u_is_q():
    assert u * u**3 == q


def test_difference_of_squares_in_v():
    assert (v - v**-1) * (v + v**-1) == v**2 - v**-2


def test_canonical_form_drops_zero_coefficients():
    assert L({3: 0, 1: 2}) == L({1: 2})
    assert (q - q).is_zero()


def brute_force_cyclotomic_factors(exponent: int) -> set[int]:
    """Orders d | exponent: q^e - 1 = prod_{d | e} Phi_d(q)."""
    return {d for d in range(1, exponent + 1) if exponent % d == 0}


def test_gcd_matches_shared_cyclotomic_factors():
    # q^2-1 and q^3-1 share only Phi_1 = q - 1
    shared = brute_force_cyclotomic_factors(2) & brute_force_cyclotomic_factors(3)
    assert shared == {1}
    g = (q**2 - 1).gcd(q**3 - 1)
    assert g == q - 1 or g == 1 - q
    (q**2 - 1).exact_div(g)
    (q**3 - 1).exact_div(g)


def test_exact_div_inverts_mul():
    rng = random.Random(7)
    for _ in range(20):
        a, b = random_laurent(rng), random_laurent(rng)
        if b.is_zero():
            continue
        assert (a * b).exact_div(b) == a


def test_exact_div_signals_non_divisibility():
    with pytest.raises(NotDivisibleError):
        (q + 1).exact_div(q - 1)
    with pytest.raises(ZeroDivisionError):
        q.exact_div(L())


def test_ring_axioms_on_random_triples():
    rng = random.Random(11)
    for _ in range(30):
        a, b, c = (random_laurent(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a


def test_ratfunc_normalize_cancels_common_factor():
    assert RatFunc(q**2 - 1, q - 1) == RatFunc(q + 1)


def test_ratfunc_inverse():
    x = RatFunc(1 - q**-3, 1 + q)
    assert x * x.inv() == RatFunc(1)
    with pytest.raises(ZeroDivisionError):
        RatFunc(0).inv()


def test_ratfunc_common_denominator():
    assert RatFunc(1, 1 - q) + RatFunc(q, 1 - q) == RatFunc(1 + q, 1 - q)


def test_ratfunc_normalize_idempotent_and_equals():
    x = RatFunc(q**3 - q, q**2 + q)
    assert x.normalize() == x.normalize().normalize()
    y = RatFunc(q - 1)
    assert x.equals(y)
    assert (x - y).is_zero()


def test_ratfunc_canonical_denominator():
    x = RatFunc(q, -2 * q**3 + 4 * q**2)
    assert x.den.min_exp() == 0
    assert x.den.lc() > 0


def test_substitute_examples():
    assert CoeffPoly.parse("q - Q").substitute(1).is_zero()
    assert CoeffPoly.parse("Q^2").substitute(3) == q**6
    assert CoeffPoly.parse("1 + q - Q + Q^2").substitute(2) == 1 + q - q**2 + q**4


def test_substitute_commutes_with_multiplication():
    a = CoeffPoly.parse("1 + q*Q - Q^3")
    b = CoeffPoly.parse("q^2 - Q")
    for n in range(-3, 5):
        assert (a * b).substitute(n) == a.substitute(n) * b.substitute(n)


def test_solve_linear_one_by_one():
    sol = solve_linear([[q]], [q**2])
    assert sol.particular == [RatFunc(q)]


def test_solve_linear_identity():
    rhs = [RatFunc(q + 1), RatFunc(1, 1 - q), RatFunc(0)]
    ident = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
    assert solve_linear(ident, rhs).particular == rhs


def test_solve_linear_nullspace_rank_deficient():
    M = [[1, q], [q**-1, 1]]
    # determinant oracle: 1*1 - q*q^{-1} = 0
    assert 1 * 1 - q * q**-1 == 0
    basis = solve_linear(M).nullspace
    assert len(basis) == 1
    x, y = basis[0]
    # proportional to (q, -1)
    assert x * RatFunc(-1) == y * RatFunc(q)
    for row in M:
        assert sum((RatFunc.of(a) * b for a, b in zip(row, basis[0])), RatFunc(0)).is_zero()


def test_solve_linear_back_substitution_random():
    rng = random.Random(3)
    for _ in range(5):
        M = [[random_laurent(rng, 2) for _ in range(3)] for _ in range(3)]
        rhs = [random_laurent(rng, 2) for _ in range(3)]
        sol = solve_linear(M, rhs)
        if sol.particular is None:
            continue
        for row, b in zip(M, rhs):
            lhs = sum((RatFunc.of(a) * x for a, x in zip(row, sol.particular)), RatFunc(0))
            assert lhs == RatFunc.of(b)


def test_render_and_parse_round_trip():
    text = "q^(-1/2) + q^(-3/2) + q^(-5/2) - q^(-9/2)"
    p = L.parse(text)
    assert str(p) == text
    assert L.parse(str(p)) == p
    assert L.from_json(p.to_json()) == p


def test_json_layout_uses_u_units():
    assert L.parse("2/3*q^(1/4)").to_json() == [[1, "2", "3"]]


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        L.parse("q^^2")
