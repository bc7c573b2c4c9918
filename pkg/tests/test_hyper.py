from __future__ import annotations

import random

import pytest

from qholo.braid import label_long_knot, parse_braid
from qholo.hyper import (
    TRACE_WEIGHT,
    PoleError,
    SupportError,
    build_Fw,
    family,
    multisum,
    naive_sum,
    parse_term,
    support_points,
)
from qholo.jones import broken_trace
from qholo.qring import LaurentPoly, RatFunc

from conftest import figure8_closed_form, trefoil_closed_form, twist_one_closed_form

L = LaurentPoly
q = L.q()

FAMILIES = ["twist:-1", "twist:0", "twist:1", "twist:2", "figure8-jones", "trefoil-intro"]


def test_figure8_summand_values():
    t = family("figure8-jones")
    assert t.evaluate([1, 1]).is_zero()
    assert t.evaluate([2, 1]) == RatFunc(q**2 * (1 - q**-3) * (1 - q**-1))


def test_trefoil_intro_summand_at_origin():
    t = family("trefoil-intro")
    num, den = t.eval_parts([1, 0])
    assert num == 1 - q**-1
    assert t.evaluate([1, 0]) == RatFunc(1)


def test_shift_ratio_of_quadratic_power():
    assert str(parse_term("qpow(n*k)").shift_ratio("k")) == "Q"


def test_shift_ratio_of_pochhammer():
    r = parse_term("poch(q;q;k)").shift_ratio("k")
    assert str(r) == "1 - q*K"


def _ratio_check(t, var: str, samples: int, seed: int) -> int:
    rng = random.Random(seed)
    fr = t.ratio_factored(var)
    pts = [p for n in range(1, 7) for p in support_points(t, n) if t.evaluate(p)]
    checked = 0
    for pt in rng.sample(pts, min(len(pts), 4 * samples)):
        nxt = list(pt)
        nxt[t.index(var)] += 1
        try:
            got = fr.evaluate(pt)
        except (ZeroDivisionError, PoleError):
            continue
        assert got == t.evaluate(nxt) / t.evaluate(pt), (t.label, var, pt)
        checked += 1
        if checked == samples:
            break
    return checked


@pytest.mark.parametrize("name", FAMILIES + ["Fw:[1,1,1]", "Fw:[1,-2,1,-2]"])
def test_shift_ratios_match_evaluation_quotients(name):
    t = family(name)
    for var in t.names:
        assert _ratio_check(t, var, 30, seed=sum(map(ord, name))) >= 10


def test_symbolic_n_ratio_of_figure8():
    t = family("figure8-jones")
    r = t.shift_ratio("n")
    for n in range(2, 7):
        for k in range(0, n - 1):
            want = t.evaluate([n + 1, k]) / t.evaluate([n, k])
            assert r.substitute(n, K=k) == want


def test_multisum_examples():
    assert multisum(family("twist:-1"), 3) == RatFunc(1)
    assert multisum(family("twist:1"), 2) == RatFunc(q**5)
    assert multisum(family("figure8-jones"), 2) == RatFunc(q**2 - q + 1 - q**-1 + q**-2)


def test_families_against_closed_forms():
    for n in range(1, 8):
        assert multisum(family("figure8-jones"), n) == RatFunc(figure8_closed_form(n))
        assert multisum(family("trefoil-intro"), n) == trefoil_closed_form(n)
    for n in range(0, 8):
        assert multisum(family("twist:1"), n) == RatFunc(twist_one_closed_form(n))
        assert multisum(family("twist:-1"), n) == RatFunc(1)


@pytest.mark.parametrize("name", FAMILIES)
def test_multisum_matches_naive_box_sum(name):
    t = family(name)
    lo = 1 if name in ("figure8-jones", "trefoil-intro") else 0
    for n in range(lo, 9):
        assert multisum(t, n) == naive_sum(t, n, max(4 * n, 2)), (name, n)


def test_support_failure_is_reported():
    with pytest.raises(SupportError):
        multisum(parse_term("qpow(k)"), 2)
    with pytest.raises(SupportError):
        multisum(family("figure8-jones"), 0)


@pytest.mark.parametrize("word,top", [("[1]", 6), ("[1,1,1]", 6), ("[1,-2,1,-2]", 5)])
def test_Fw_multisum_equals_broken_trace(word, top):
    b = parse_braid(word)
    t = build_Fw(label_long_knot(b), b)
    assert t.is_proper()
    for n in range(1, top + 1):
        assert multisum(t, n) == RatFunc(broken_trace(b, n))


def test_Fw_trace_weight_readings():
    """The half-n strand weight misses the broken trace; the K^{-1} weight matches."""
    assert TRACE_WEIGHT == "K-inverse"
    b = parse_braid("[1,-2,1,-2]")
    labels = label_long_knot(b)
    half = build_Fw(labels, b, weight="half-n")
    assert any(multisum(half, n) != RatFunc(broken_trace(b, n)) for n in range(2, 4))
    with pytest.raises(ValueError):
        build_Fw(labels, b, weight="other")


def test_parse_term_round_trip_text():
    t = parse_term("sign(n+k) qpow(k*(k-1)/2) binom(n,k) / poch(q;q;k)")
    again = parse_term(t.text())
    for n in range(0, 5):
        assert multisum(t, n) == multisum(again, n)


def test_parse_term_rejects_unknown_token():
    with pytest.raises(ValueError):
        parse_term("frobnicate(n)")
