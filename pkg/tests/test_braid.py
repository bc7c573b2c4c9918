from __future__ import annotations

import random

import pytest

from qholo.braid import (
    PRESETS,
    BraidParseError,
    LinearForm,
    check_labels,
    closure_info,
    label_long_knot,
    parse_braid,
)

KNOT_WORDS = ["[1]", "[1,1,1]", "[1,-2,1,-2]", "[1,1,1,2,-1,2]", "[-1,-1,-1]", "[1,1,1,1,1]", "[1,2,3]"]


def test_parse_infers_strands():
    b = parse_braid("[1,1,1]")
    assert b.strands == 2
    assert b.letters == (1, 1, 1)
    b = parse_braid("[1,-2,1,-2]")
    assert b.strands == 3
    assert b.letters == (1, -2, 1, -2)


def test_parse_explicit_strands():
    assert parse_braid("[1]", strands=4).strands == 4
    with pytest.raises(BraidParseError):
        parse_braid("[3]", strands=3)


@pytest.mark.parametrize("text", ["[0]", "[1,,2]", "1,2", "[a]", "[1.5]"])
def test_parse_rejects_malformed(text):
    with pytest.raises(BraidParseError):
        parse_braid(text)


def test_closure_of_trefoil():
    info = closure_info(parse_braid("[1,1,1]"))
    assert info.permutation == (2, 1)
    assert info.components == 1
    assert info.writhe == 3


def test_closure_of_figure8():
    info = closure_info(parse_braid(PRESETS["figure8"]))
    assert info.components == 1
    assert info.writhe == 0


def test_closure_of_empty_word():
    info = closure_info(parse_braid("[]", strands=2))
    assert info.permutation == (1, 2)
    assert info.components == 2
    assert info.writhe == 0


def test_labels_single_crossing():
    lab = label_long_knot(parse_braid("[1]"))
    k1 = LinearForm.var(1)
    assert lab.x[0] == LinearForm()
    assert lab.y[0] == -k1
    assert lab.top[1] == -k1
    assert all(x == 0 for level in lab.substitute([0]) for x in level)


def test_labels_trefoil_satisfy_relations():
    lab = label_long_knot(parse_braid("[1,1,1]"))
    assert len(lab.x) + len(lab.y) == 6
    for k in [(0, 0, 0), (1, 2, 3), (5, 0, 2)]:
        assert check_labels(lab, k)


def test_labels_reject_links():
    with pytest.raises(ValueError):
        label_long_knot(parse_braid("[1,1]"))


@pytest.mark.parametrize("word", KNOT_WORDS)
def test_labels_consistent_and_unique(word):
    b = parse_braid(word)
    lab = label_long_knot(b)
    rng = random.Random(word)
    for _ in range(20):
        k = [rng.randint(0, 6) for _ in range(b.crossings)]
        assert check_labels(lab, k)
    again = label_long_knot(b)
    assert again.levels == lab.levels
    assert lab.levels[0][lab.start - 1].is_zero()


def test_checker_rejects_broken_labeling():
    lab = label_long_knot(parse_braid("[1,1,1]"))
    lab.levels[1][0] = lab.levels[1][0] + LinearForm.make(1)
    assert not check_labels(lab, (1, 1, 1))
