from __future__ import annotations

import itertools
import random

import pytest

from qholo.braid import parse_braid
from qholo.jones import (
    FRAMING_SIGN,
    MINUS_READING,
    apply_crossing,
    b_entry,
    braiding_matrix,
    broken_trace,
    f_minus,
    f_plus,
    jones,
    jones_table,
    quantum_trace,
)
from qholo.qring import LaurentPoly, RatFunc
from qholo.qspecial import qint

from conftest import state_sum, trefoil_closed_form

L = LaurentPoly
q, v, u = L.q(), L.v(), L.u()


def test_f_plus_k_zero_closed_form():
    for n1, n2, a, b in [(2, 2, 0, 0), (3, 4, 1, 2), (5, 2, 4, 1)]:
        assert f_plus(n1, n2, a, b, 0) == L.u(-(n1 - 1 - 2 * a) * (n2 - 1 - 2 * b))


def test_f_plus_negative_k_vanishes():
    assert f_plus(3, 3, 1, 1, -1).is_zero()
    assert f_minus(3, 3, 1, 1, -1).is_zero()


def test_f_minus_hand_value():
    # v^{((2-1-0-2)(2-1-2+2)+0)/2} binom(1,1) {1}_1 = v^{-1/2} (v - v^{-1})
    assert f_minus(2, 2, 0, 1, 1) == L.u(-1) * (v - v**-1)


def test_b_entry_delta_pattern():
    assert b_entry(1, 3, 3, 0, 1, 0, 0).is_zero()
    assert b_entry(1, 2, 2, 0, 0, 0, 0) == f_plus(2, 2, 0, 0, 0) == L.u(-1)


def _matrix_product(first: dict, second: dict) -> dict:
    out: dict = {}
    for (src, mid), x in first.items():
        for (mid2, dst), y in second.items():
            if mid == mid2:
                out[(src, dst)] = out.get((src, dst), L()) + x * y
    return {k: val for k, val in out.items() if val}


def _is_identity(mat: dict, n1: int, n2: int) -> bool:
    want = {((a, b), (a, b)): L(1) for a in range(n1) for b in range(n2)}
    return mat == want


def test_braiding_inverse_on_small_colors():
    for n1 in range(1, 4):
        for n2 in range(1, 4):
            plus = braiding_matrix(1, n1, n2)
            minus = braiding_matrix(-1, n2, n1)
            assert _is_identity(_matrix_product(plus, minus), n1, n2)
            assert _is_identity(_matrix_product(braiding_matrix(-1, n1, n2), braiding_matrix(1, n2, n1)), n1, n2)


def test_braiding_inverse_readings():
    """Only one literal reading of the inverse braiding inverts B+."""

    def inverts(reading: str) -> bool:
        for n1 in range(1, 5):
            for n2 in range(1, 5):
                minus = braiding_matrix(-1, n1, n2, reading)
                plus = braiding_matrix(1, n2, n1)
                if not _is_identity(_matrix_product(minus, plus), n1, n2):
                    return False
        return True

    assert inverts("f_minus")
    assert not inverts("f_plus")
    assert MINUS_READING == "f_minus"


def test_apply_crossing_empty_state():
    st, cols = apply_crossing({}, 1, 1, [3, 3])
    assert st == {}
    assert cols == [3, 3]


def test_apply_crossing_round_trip_random_states():
    rng = random.Random(5)
    for _ in range(10):
        state = {(rng.randrange(3), rng.randrange(3)): L.u(rng.randint(-4, 4)) * rng.randint(1, 3) for _ in range(3)}
        mid, cols = apply_crossing(state, 1, 1, [3, 3])
        back, cols2 = apply_crossing(mid, 1, -1, cols)
        assert back == state
        assert cols2 == [3, 3]


def test_apply_crossing_matches_dense_matrix():
    basis = [(a, b) for a in range(2) for b in range(2)]
    for src in basis:
        out, _ = apply_crossing({src: L(1)}, 1, 1, [2, 2])
        dense = {dst: b_entry(1, 2, 2, src[0], src[1], dst[0], dst[1]) for dst in basis}
        assert out == {k: x for k, x in dense.items() if x}
    out, _ = apply_crossing({(0, 0): L(1)}, 1, 1, [2, 2])
    assert out[(0, 0)] == L.u(-1)


def test_apply_crossing_position_checked():
    with pytest.raises(ValueError):
        apply_crossing({(0, 0): L(1)}, 2, 1, [2, 2])


def test_trace_of_trivial_braid_is_quantum_dimension():
    b = parse_braid("[]", strands=1)
    for n in range(1, 7):
        geometric = sum((v ** (n - 2 * a - 1) for a in range(n)), L())
        assert quantum_trace(b, n) == geometric == qint(n)
        assert broken_trace(b, n) == 1


@pytest.mark.parametrize("word", ["[1]", "[1,1,1]", "[1,-2,1,-2]", "[-1,-1,-1]"])
def test_full_trace_is_broken_trace_times_dimension(word):
    b = parse_braid(word)
    for n in range(1, 5):
        assert quantum_trace(b, n) == broken_trace(b, n) * qint(n)


def apply_letters(state: dict, letters, colors):
    cols = list(colors)
    for letter in letters:
        state, cols = apply_crossing(state, abs(letter), 1 if letter > 0 else -1, cols)
    return state


def test_yang_baxter_on_basis_states():
    for n in range(1, 5):
        for idx in itertools.product(range(n), repeat=3):
            start = {idx: L(1)}
            assert apply_letters(start, (1, 2, 1), [n] * 3) == apply_letters(start, (2, 1, 2), [n] * 3)


def test_braid_group_relations_preserve_trace():
    pairs = [("[1,2,1]", "[2,1,2]"), ("[-1,2,1]", "[2,1,-2]"), ("[1,3]", "[3,1]")]
    for left, right in pairs:
        strands = 4 if "3" in left else 3
        a, b = parse_braid(left, strands), parse_braid(right, strands)
        for n in range(1, 4):
            assert quantum_trace(a, n) == quantum_trace(b, n)


def test_unknot_normalization():
    for n in range(1, 11):
        assert jones("[1]", n) == qint(n)


def test_markov_stability():
    for n in range(1, 7):
        assert jones("[1]", n) == jones("[1,1,-1]", n)
        assert jones("[1,1,1]", n) == jones("[1,1,1,2]", n)


def test_trefoil_small_colors():
    assert jones("[1,1,1]", 1) == 1
    want = L.parse("q^(-1/2) + q^(-3/2) + q^(-5/2) - q^(-9/2)")
    assert RatFunc(want) == trefoil_closed_form(2)
    assert state_sum("[1,1,1]", 2, mirror=True) == want


def test_framing_sign_pinned_by_trefoil():
    assert FRAMING_SIGN == -1
    for n in range(1, 5):
        assert RatFunc(state_sum("[1,1,1]", n, mirror=True)) == trefoil_closed_form(n)


@pytest.mark.parametrize("word", ["[1,1,1]", "[1,-2,1,-2]"])
def test_zero_framed_long_values_are_integral(word):
    for n in range(1, 9):
        val = state_sum(word, n, "long")
        assert val.is_integral()
        assert all(e % 4 == 0 for e in val.terms)


def test_long_normalization_divides_by_dimension():
    for n in range(1, 5):
        assert state_sum("[1,-2,1,-2]", n, "long") * qint(n) == state_sum("[1,-2,1,-2]", n)


def test_link_trace_per_component():
    unlink = parse_braid("[]", strands=2)
    assert quantum_trace(unlink, [2, 3]) == qint(2) * qint(3)
    hopf = parse_braid("[1,1]")
    assert quantum_trace(hopf, [2, 3]) == quantum_trace(hopf, [3, 2])
    assert quantum_trace(hopf, [2, 2]) == quantum_trace(hopf, 2)
    with pytest.raises(ValueError):
        quantum_trace(parse_braid("[1]"), [2, 3])
    with pytest.raises(ValueError):
        broken_trace(hopf, 2)
    with pytest.raises(ValueError):
        jones(hopf, 2, "long")


def test_bad_normalization_and_color():
    with pytest.raises(ValueError):
        jones("[1]", 2, "weird")
    with pytest.raises(ValueError):
        jones("[1]", 0)


def test_jones_table_json():
    table = jones_table("[1,1,1]", range(1, 3), name="trefoil")
    data = table.to_json()
    assert data["knot"] == "trefoil"
    assert data["normalization"] == "zero-framed"
    assert data["values"][0] == [1, "1"]
