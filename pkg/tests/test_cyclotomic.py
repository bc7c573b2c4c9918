from __future__ import annotations

import pytest

from qholo.cyclotomic import (
    ALIGNMENT_SHIFT,
    TWIST_BRAIDS,
    CycloSeq,
    InsufficientJones,
    choose_alignment,
    cyclotomic_to_jones,
    integrality_check,
    jones_to_cyclotomic,
    twist_cyclotomic,
    twist_values,
)
from qholo.qring import LaurentPoly, RatFunc
from qholo.qspecial import qint

from conftest import figure8_closed_form, state_sums, twist_one_closed_form

L = LaurentPoly
q = L.q()


def test_unknot_gives_delta_sequence():
    J = {n: qint(n) for n in range(1, 7)}
    C = jones_to_cyclotomic(J, 6)
    assert C[1] == RatFunc(1)
    assert all(C[n].is_zero() for n in range(2, 7))


def test_figure8_cyclotomic_is_one():
    C = jones_to_cyclotomic(state_sums("[1,-2,1,-2]", range(1, 6)), 5)
    assert all(C[n] == RatFunc(1) for n in range(1, 6))
    assert all(integrality_check(C).values())


def test_trefoil_cyclotomic_matches_twist_one():
    C = jones_to_cyclotomic(state_sums("[1,1,1]", range(1, 8)), 7)
    for k in range(1, 8):
        assert C[k] == RatFunc(twist_one_closed_form(k + ALIGNMENT_SHIFT))
    assert all(integrality_check(C).values())


def test_round_trip_trefoil():
    J = state_sums("[1,1,1]", range(1, 9))
    C = jones_to_cyclotomic(J, 8)
    for n in range(1, 9):
        assert cyclotomic_to_jones(C, n) == RatFunc(J[n])


def test_delta_sequence_gives_quantum_integers():
    C = {k: RatFunc(1 if k == 1 else 0) for k in range(1, 8)}
    for n in range(1, 8):
        assert cyclotomic_to_jones(C, n) == RatFunc(qint(n))


def test_constant_one_gives_figure8():
    C = {k: RatFunc(1) for k in range(1, 7)}
    for n in range(1, 7):
        assert cyclotomic_to_jones(C, n) == RatFunc(qint(n) * figure8_closed_form(n))


def test_integrality_check_rejects_fractions():
    report = integrality_check({1: RatFunc(1, 1 - q), 2: RatFunc(L.parse("1/2*q")), 3: RatFunc(L.u(1)), 4: RatFunc(q)})
    assert report == {1: False, 2: False, 3: False, 4: True}


def test_insufficient_jones_range():
    with pytest.raises(InsufficientJones):
        jones_to_cyclotomic({1: L(1), 3: L(1)}, 3)
    with pytest.raises(InsufficientJones):
        cyclotomic_to_jones({1: RatFunc(1)}, 2)


@pytest.mark.parametrize("p", [-1, 0, 1, 2])
def test_twist_knots_transform_equals_closed_form(p):
    J = state_sums(TWIST_BRAIDS[p], range(1, 6))
    C = jones_to_cyclotomic(J, 5)
    closed = twist_cyclotomic(p, 5)
    assert all(C[k] == closed[k] for k in range(1, 6))
    assert all(integrality_check(C).values())


def test_alignment_is_chosen_by_the_expansion():
    J = state_sums("[1,1,1]", range(1, 6))
    assert choose_alignment(J, lambda ns: twist_values(1, ns)) == ALIGNMENT_SHIFT == -1


def test_twist_zero_is_the_unknot():
    vals = twist_values(0, range(0, 5))
    assert vals[0] == RatFunc(1)
    assert all(vals[n].is_zero() for n in range(1, 5))


def test_cycloseq_json():
    C = CycloSeq({2: RatFunc(q), 1: RatFunc(1)}, "from-closed-form", "demo")
    assert C.to_json() == {"label": "demo", "provenance": "from-closed-form", "values": [[1, "1", True], [2, "q", True]]}
    with pytest.raises(ValueError):
        CycloSeq({}, "guessed")
