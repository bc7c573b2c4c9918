from __future__ import annotations

import pytest

from qholo.hyper import family, parse_term
from qholo.holonomy import (
    InsufficientData,
    Recurrence,
    Sequence,
    check_initial_bound,
    forward_solve,
    guess_recurrence,
    initial_bound,
    order_bound,
    verify_recurrence,
)
from qholo.holonomy.guess import no_recurrence_below
from qholo.holonomy.presets import figure8_homogeneous, trefoil_recursion
from qholo.qring import CoeffPoly, LaurentPoly, RatFunc

from conftest import figure8_guessed, figure8_long_values, state_sums

L = LaurentPoly


def test_guess_geometric():
    f = Sequence({n: RatFunc(L.q(n)) for n in range(0, 16)})
    r = guess_recurrence(f, max_order=2, max_degree=2, holdout=4)
    assert r.order == 1
    assert r.provenance == "guessed"
    assert [str(c) for c in r.coeffs] == ["-q", "1"] or [str(c) for c in r.coeffs] == ["q", "-1"]


def test_guess_trefoil_order_two():
    # mirrored state sums are the values the printed 3-term relation describes
    values = {0: LaurentPoly(), **state_sums("[1,1,1]", range(1, 15), mirror=True)}
    f = Sequence(values)
    r = guess_recurrence(f, max_order=3, max_degree=8, holdout=3)
    assert r is not None
    assert r.order == 2
    assert verify_recurrence(r, f, range(0, 13))
    assert verify_recurrence(trefoil_recursion(), f, range(2, 15))


def test_guess_figure8_order_three():
    f = Sequence(figure8_long_values(25))
    r = figure8_guessed()
    assert r is not None
    assert r.order <= 3
    assert r.is_homogeneous()
    assert r.verified_range == (1, 22)
    assert verify_recurrence(r, f, range(1, 23))
    assert verify_recurrence(figure8_homogeneous(), f, range(3, 26))


def test_figure8_has_no_order_one_recurrence():
    f = Sequence(figure8_long_values(25))
    assert guess_recurrence(f, max_order=1, max_degree=8, holdout=10) is None
    assert no_recurrence_below(f, 2, holdout=10)


def test_guess_insufficient_data():
    f = Sequence({n: RatFunc(L.q(n)) for n in range(0, 5)})
    with pytest.raises(InsufficientData):
        guess_recurrence(f, holdout=10)


def test_order_bound_figure8():
    b = order_bound(family("figure8-jones"))
    assert b.refined == 2
    assert b.r == 1
    assert b.global_bound >= b.refined


def test_order_bound_single_pochhammer():
    b = order_bound(parse_term("poch(q;q;k)"))
    assert (b.S, b.T, b.B, b.r) == (1, 1, 1, 1)
    assert b.global_bound == 4


def test_order_bound_twist_two():
    b = order_bound(family("twist:2"))
    assert b.global_bound >= 2
    assert b.refined >= 2


def test_initial_bound_constant_symbol():
    r = Recurrence((CoeffPoly.parse("q"), CoeffPoly.parse("-1"), CoeffPoly.parse("1")))
    ib = initial_bound(r)
    assert ib.bound == r.order
    assert ib.vanishing == ()


def test_initial_bound_linear_symbol():
    r = Recurrence((CoeffPoly.parse("1"), CoeffPoly.parse("q - Q")))
    ib = initial_bound(r)
    assert ib.vanishing == (1,)
    assert ib.deg_q == 1
    assert ib.bound == r.order + 1
    assert ib.first_forced == 3


def test_initial_bound_rejects_inhomogeneous():
    from qholo.holonomy.presets import figure8_inhomogeneous

    with pytest.raises(ValueError):
        initial_bound(figure8_inhomogeneous())


def test_initial_bound_figure8_forward_solve():
    r = figure8_guessed()
    values = figure8_long_values(25)
    ib = initial_bound(r, start=1)
    assert ib.first_forced - 1 <= ib.bound + r.order
    assert check_initial_bound(r, values, 1, 25)
    seed = {n: values[n] for n in range(1, ib.first_forced)}
    out = forward_solve(r, seed, 25)
    assert all(out[n] == values[n] for n in range(ib.first_forced, 26))
