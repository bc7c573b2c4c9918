from __future__ import annotations

import json

import pytest

from qholo.cli import (
    EXIT_CAPS,
    EXIT_FAILED,
    EXIT_NONE,
    EXIT_OK,
    EXIT_UNSUPPORTED,
    EXIT_USAGE,
    RunConfig,
    CliError,
    main,
    parse_range,
)
from qholo.holonomy import Recurrence
from qholo.jones import jones


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_jones_table(capsys):
    code, out, _ = run(capsys, "jones", "--knot", "trefoil", "--n", "1..4")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "1\t1"
    assert lines[1] == f"2\t{jones('[1,1,1]', 2)}"
    assert len(lines) == 4


def test_jones_json_schema(capsys):
    code, out, _ = run(capsys, "jones", "--knot", "[1,-2,1,-2]", "--n", "1..3", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["normalization"] == "zero-framed"
    assert [row[0] for row in data["values"]] == [1, 2, 3]


def test_output_is_deterministic(capsys):
    first = run(capsys, "cyclotomic", "--knot", "figure8", "--n", "1..4", "--format", "json")
    second = run(capsys, "cyclotomic", "--knot", "figure8", "--n", "1..4", "--format", "json")
    assert first == second
    data = json.loads(first[1])
    assert [row[1:] for row in data["values"]] == [["1", True]] * 4


def test_cyclotomic_refuses_framed_input(capsys):
    code, _, err = run(capsys, "cyclotomic", "--knot", "trefoil", "--normalization", "framed", "--n", "1..3")
    assert code == EXIT_UNSUPPORTED
    assert json.loads(err)["error"] == "unsupported"


def test_links_are_refused_where_knots_are_needed(capsys):
    code, _, err = run(capsys, "cyclotomic", "--knot", "[1,1]", "--n", "1..2")
    assert code == EXIT_UNSUPPORTED


def test_parse_errors(capsys):
    code, _, err = run(capsys, "jones", "--knot", "[0]", "--n", "1..2")
    assert code == EXIT_USAGE
    assert json.loads(err)["error"] == "parse"
    code, _, _ = run(capsys, "jones", "--knot", "trefoil", "--n", "4..x")
    assert code == EXIT_USAGE


def test_parse_range():
    assert parse_range("3..12") == (3, 12)
    assert parse_range("5") == (5, 5)
    with pytest.raises(CliError):
        parse_range("1-4")


def test_run_config_validation():
    with pytest.raises(CliError):
        RunConfig(command="jones", normalization="weird").validate()
    with pytest.raises(CliError):
        RunConfig(command="jones", max_order=0).validate()


def test_multisum_family(capsys):
    code, out, _ = run(capsys, "multisum", "--family", "figure8-jones", "--n", "1..2")
    assert code == EXIT_OK
    assert out.splitlines()[1] == "2\tq^2 - q + 1 - q^(-1) + q^(-2)"


def test_telescope_twist_one(capsys):
    code, out, _ = run(capsys, "telescope", "--family", "twist:1", "--max-order", "3", "--format", "json")
    assert code == EXIT_OK
    r = Recurrence.from_json(out)
    assert r.order == 1
    assert [str(c) for c in r.coeffs] == ["q^2*Q", "1"]


def test_telescope_reports_none_and_caps(capsys):
    code, _, err = run(capsys, "telescope", "--family", "twist:2", "--max-order", "1")
    assert code == EXIT_NONE
    assert json.loads(err)["error"] == "none"
    code, _, err = run(capsys, "telescope", "--family", "figure8-jones", "--min-order", "1", "--max-order", "1")
    assert code == EXIT_NONE


def test_telescope_lists_failed_orders(capsys):
    code, out, _ = run(capsys, "telescope", "--family", "twist:2", "--max-order", "2")
    assert code == EXIT_OK
    assert "No solution: increase order by 1" in out


def test_recursion_caps_exhausted(capsys):
    code, _, err = run(capsys, "recursion", "--family", "figure8-jones", "--n", "1..25", "--max-order", "1")
    assert code == EXIT_CAPS
    assert json.loads(err)["error"] == "caps-exhausted"


def test_recursion_guess_trefoil(capsys):
    code, out, _ = run(
        capsys, "recursion", "--knot", "trefoil", "--n", "0..14", "--holdout", "3", "--mirror", "--format", "json"
    )
    assert code == EXIT_OK
    assert Recurrence.from_json(out).order == 2


def test_verify_printed_figure8(capsys, tmp_path):
    code, out, _ = run(capsys, "recursion", "--printed", "figure8-homogeneous", "--format", "json")
    assert code == EXIT_OK
    path = tmp_path / "out7.json"
    path.write_text(out)
    code, out, _ = run(capsys, "verify", "--knot", "figure8", "--recurrence", str(path), "--range", "3..12", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["all"] is True
    assert data["report"] == {str(n): True for n in range(3, 13)}


def test_verify_reports_failure(capsys, tmp_path):
    code, out, _ = run(capsys, "recursion", "--printed", "twist:1", "--format", "json")
    path = tmp_path / "twist1.json"
    path.write_text(out)
    code, _, _ = run(capsys, "verify", "--family", "twist:2", "--recurrence", str(path), "--range", "2..6")
    assert code == EXIT_FAILED


def test_verify_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--knot", "figure8", "--recurrence", str(tmp_path / "nope.json"), "--range", "3..5")
    assert code == EXIT_USAGE
