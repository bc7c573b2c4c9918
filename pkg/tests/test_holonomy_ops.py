from __future__ import annotations

import random

import pytest

from qholo.holonomy import (
    InsufficientRange,
    Recurrence,
    Sequence,
    WeylOperator,
    forward_solve,
    from_backward,
    op_apply,
    op_mul,
    verify_recurrence,
    verify_report,
)
from qholo.holonomy.presets import PRINTED, figure8_homogeneous, trefoil_recursion, twist_recursion
from qholo.qring import CoeffPoly, LaurentPoly, RatFunc

L = LaurentPoly
q = L.q()
W = WeylOperator.parse


def test_E_times_Q_normal_order():
    assert op_mul(W("E"), W("Q")) == W("q*Q*E")


def test_E_minus_one_kills_constants():
    const = Sequence({n: RatFunc(7) for n in range(0, 10)})
    for n in range(0, 9):
        assert op_apply(W("E - 1"), const, n).is_zero()


def test_Q_multiplies_by_q_power():
    f = Sequence({n: RatFunc(1 + q**n) for n in range(0, 6)})
    for n in range(0, 6):
        assert op_apply(W("Q"), f, n) == RatFunc(q**n * (1 + q**n))


def test_insufficient_sequence_range():
    f = Sequence({n: RatFunc(1) for n in range(0, 3)})
    with pytest.raises(InsufficientRange):
        op_apply(W("E^2"), f, 2)


def _random_word(rng: random.Random, variables) -> list[WeylOperator]:
    gens = []
    for x in variables:
        gens += [WeylOperator.E(x, 1, variables), WeylOperator.Q(x, 1, variables), WeylOperator.const(q, variables)]
    return [rng.choice(gens) for _ in range(rng.randint(1, 6))]


def test_normal_ordering_is_confluent():
    rng = random.Random(2)
    for variables in (("n",), ("n", "k")):
        for _ in range(40):
            word = _random_word(rng, variables)
            left = word[0]
            for w in word[1:]:
                left = left * w
            right = word[-1]
            for w in reversed(word[:-1]):
                right = w * right
            assert left == right


def _random_operator(rng: random.Random) -> WeylOperator:
    terms = {}
    for _ in range(3):
        terms[((rng.randint(-2, 2),), (rng.randint(0, 2),))] = L.q(rng.randint(-2, 2)) * rng.randint(1, 3)
    return WeylOperator(terms)


def test_action_is_a_homomorphism():
    rng = random.Random(4)
    f = Sequence({n: RatFunc(L.q(n * n) - 2 * L.q(n) + 3) for n in range(-2, 14)})
    for _ in range(20):
        a, b = _random_operator(rng), _random_operator(rng)
        inner = Sequence({n: op_apply(b, f, n) for n in range(-2, 9)})
        for n in range(-2, 5):
            assert op_apply(a * b, f, n) == op_apply(a, inner, n)


def test_two_variable_relations():
    vs = ("n", "k")
    assert W("E_k*Q_k", vs) == W("q*Q_k*E_k", vs)
    assert W("E*Q_k", vs) == W("Q_k*E", vs)


def test_operator_text_round_trip():
    op = W("(q^2 - Q)*E^2 + (1 + q - Q + Q^2)*E + q*Q^3")
    assert W(str(op)) == op


def test_recurrence_needs_nonzero_leading_coefficient():
    with pytest.raises(ValueError):
        Recurrence((CoeffPoly.parse("1"), CoeffPoly.parse("0")))


def test_geometric_sequence_recurrence():
    r = Recurrence((CoeffPoly.parse("-q"), CoeffPoly.parse("1")))
    f = Sequence({n: RatFunc(L.q(n)) for n in range(0, 10)})
    assert verify_recurrence(r, f, range(0, 9))
    bad = Sequence({n: RatFunc(L.q(2 * n)) for n in range(0, 10)})
    assert not verify_recurrence(r, bad, range(0, 9))


def test_backward_form_uses_offset():
    r = from_backward({0: "1", 1: "-1"})
    assert r.offset == -1
    assert r.provenance == "paper-input"
    f = Sequence({n: RatFunc(3) for n in range(0, 5)})
    assert verify_report(r, f, range(1, 5)) == {n: True for n in range(1, 5)}


def test_denominators_are_cleared():
    r = trefoil_recursion()
    assert all(isinstance(c, CoeffPoly) for c in r.coeffs)
    assert r.order == 2


def test_forward_solve_geometric():
    r = Recurrence((CoeffPoly.parse("-q"), CoeffPoly.parse("1")))
    out = forward_solve(r, {0: RatFunc(1)}, 6)
    assert out == {n: RatFunc(L.q(n)) for n in range(0, 7)}


def test_json_round_trip():
    for name in sorted(PRINTED):
        r = PRINTED[name]()
        again = Recurrence.from_json(r.dumps())
        assert again.coeffs == r.coeffs
        assert again.offset == r.offset
        assert again.is_homogeneous() == r.is_homogeneous()


def test_json_schema_fields():
    data = figure8_homogeneous().to_json()
    assert set(data) >= {"order", "coeffs", "inhomogeneous", "verified_range"}
    assert data["order"] == 3
    assert len(data["coeffs"]) == 4


def test_unknown_printed_twist():
    with pytest.raises(KeyError):
        twist_recursion(5)
