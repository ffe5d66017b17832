"""Input language parsing, report rendering, exit codes, and determinism."""

import io
import json
import pathlib

import pytest

from fibrecheck import QQ, PrimeField
from fibrecheck.cli import ParseError, parse_problem, render_problem, run

from corpus import named_fixtures

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# parsing


def test_parse_minimal_problem():
    problem = parse_problem("base y1 y2\nvars x\nideal: y1*x - y2\n")
    assert problem.field == QQ
    assert problem.base_vars == ("y1", "y2")
    assert problem.fibre_vars == ("x",)
    assert [str(g) for g in problem.ideal_gens] == ["y1*x - y2"]
    assert problem.checks == ("open", "flat")


def test_parse_prime_field_and_check():
    problem = parse_problem("field F 5\nbase y\nvars x\nideal: x^2 - y\ncheck open\n")
    assert problem.field == PrimeField(5)
    assert problem.checks == ("open",)


def test_parse_module_vectors():
    # zero entries inside module vectors are allowed; only ideal generators
    # must be nonzero
    problem = parse_problem("base y\nvars x\nmodule 2: (y; 0), (x; y)\n")
    assert problem.module.rank == 2
    assert len(problem.module.relations) == 2
    assert [str(c) for c in problem.module.relations[0]] == ["y", "0"]


def test_parse_comments_and_blank_lines():
    text = "# a comment\nbase y  # trailing comment\n\nvars x\nideal: x*y - 1\n"
    problem = parse_problem(text)
    assert problem.fibre_vars == ("x",)


def test_parse_power_override():
    problem = parse_problem("base y1 y2\nvars x\nideal: y1*x - y2\npower 1\n")
    assert problem.max_power == 1


def test_parse_error_non_prime_modulus():
    with pytest.raises(ParseError, match="non-prime"):
        parse_problem("field F 4\nbase y\n")


def test_parse_error_undeclared_variable():
    with pytest.raises(ParseError, match="undeclared variable 'x'"):
        parse_problem("base y1 y2\nideal: y1*x - y2\n")


def test_parse_error_zero_generator():
    with pytest.raises(ParseError, match="zero generator"):
        parse_problem("base y\nvars x\nideal: x - x\n")


def test_parse_error_duplicate_variable():
    with pytest.raises(ParseError, match="duplicate"):
        parse_problem("base y\nvars y\n")


def test_parse_error_missing_base():
    with pytest.raises(ParseError, match="no base variables"):
        parse_problem("vars x\nideal: x\n")


def test_parse_error_reports_location():
    try:
        parse_problem("base y1 y2\nvars x\nideal: y1*x - z\n")
    except ParseError as exc:
        assert exc.line == 3
        assert exc.col > 0
    else:
        raise AssertionError("expected a parse error")


def test_parse_error_vector_length_mismatch():
    with pytest.raises(ParseError, match="components"):
        parse_problem("base y\nvars x\nmodule 2: (y; 0; x)\n")


# ---------------------------------------------------------------------------
# round trip


def test_render_parse_round_trip_on_fixture_corpus():
    for fx in named_fixtures():
        text = render_problem(fx.problem)
        reparsed = parse_problem(text)
        assert render_problem(reparsed) == text
        assert reparsed.base_vars == fx.problem.base_vars
        assert reparsed.fibre_vars == fx.problem.fibre_vars
        assert [str(g) for g in reparsed.ideal_gens] == [
            str(g) for g in fx.problem.ideal_gens
        ]


def test_render_parse_round_trip_on_fixture_files():
    for path in sorted(FIXTURES.glob("*.alg")):
        if path.name in ("malformed.alg", "oversized.alg"):
            continue
        problem = parse_problem(path.read_text())
        assert render_problem(parse_problem(render_problem(problem))) == render_problem(problem)


# ---------------------------------------------------------------------------
# exit codes


def test_exit_zero_with_verdicts(capsys):
    code, out, err = _run(capsys, "--input", str(FIXTURES / "blowup.alg"))
    assert code == 0
    assert "NOT OPEN (vertical component at fibred power 2)" in out
    assert "witness r = " in out
    assert "NOT FLAT (torsion at tensor power 2)" in out


def test_exit_zero_positive_fixture(capsys):
    code, out, _ = _run(capsys, "--input", str(FIXTURES / "double_cover.alg"))
    assert code == 0
    assert "OPEN" in out and "NOT OPEN" not in out
    assert "FLAT" in out and "NOT FLAT" not in out


def test_exit_one_on_parse_error(capsys):
    code, out, err = _run(capsys, "--input", str(FIXTURES / "malformed.alg"))
    assert code == 1
    assert not out
    assert "undeclared variable" in err


def test_exit_one_on_missing_file(capsys):
    code, _, err = _run(capsys, "--input", str(FIXTURES / "does_not_exist.alg"))
    assert code == 1
    assert "cannot read" in err


def test_exit_two_on_charp_flatness_without_flag(capsys):
    text = "field F 5\nbase y\nvars x\nideal: x^2 - y\ncheck flat\n"
    path = FIXTURES.parent / "test_output_charp_tmp.alg"
    path.write_text(text)
    try:
        code, _, err = _run(capsys, "--input", str(path))
        assert code == 2
        assert "unsupported" in err
        code_ok, out, _ = _run(
            capsys, "--input", str(path), "--allow-char-p-flatness"
        )
        assert code_ok == 0
    finally:
        path.unlink()


def test_charp_openness_needs_no_flag(capsys):
    code, out, _ = _run(capsys, "--input", str(FIXTURES / "charp_open.alg"))
    assert code == 0
    assert "NOT OPEN" in out


def test_exit_three_on_resource_abort(capsys):
    code, out, _ = _run(
        capsys, "--input", str(FIXTURES / "oversized.alg"), "--pair-limit", "20"
    )
    assert code == 3
    assert "ABORTED" in out


def test_exit_three_on_timeout(capsys):
    code, out, _ = _run(
        capsys,
        "--input",
        str(FIXTURES / "oversized.alg"),
        "--timeout-seconds",
        "0.2",
    )
    assert code == 3
    assert "ABORTED" in out


# ---------------------------------------------------------------------------
# JSON output


def test_json_report_shape(capsys):
    code, out, _ = _run(capsys, "--input", str(FIXTURES / "blowup.alg"), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["field"] == "Q"
    assert doc["n"] == 2 and doc["m"] == 1
    kinds = {c["kind"]: c for c in doc["checks"]}
    assert kinds["open"]["outcome"] == "fail"
    assert kinds["open"]["failing_power"] == 2
    assert "witness_r" in kinds["open"] and "witness_g" in kinds["open"]
    assert kinds["flat"]["outcome"] == "fail"
    assert "certificate_r" in kinds["flat"] and "certificate_v" in kinds["flat"]
    for check in doc["checks"]:
        for entry in check["powers"]:
            assert "millis" not in entry  # timing only under --trace


def test_json_byte_identical_across_runs(capsys):
    outs = []
    for _ in range(3):
        code, out, _ = _run(capsys, "--input", str(FIXTURES / "blowup.alg"), "--json")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]
    code, out_cusp, _ = _run(capsys, "--input", str(FIXTURES / "cusp.alg"), "--json")
    code2, out_cusp2, _ = _run(capsys, "--input", str(FIXTURES / "cusp.alg"), "--json")
    assert out_cusp == out_cusp2


def test_trace_adds_millis(capsys):
    code, out, err = _run(
        capsys, "--input", str(FIXTURES / "blowup.alg"), "--json", "--trace"
    )
    assert code == 0
    doc = json.loads(out)
    assert all("millis" in e for c in doc["checks"] for e in c["powers"])
    assert "trace:" in err


def test_max_power_flag_overrides(capsys):
    code, out, _ = _run(
        capsys, "--input", str(FIXTURES / "blowup.alg"), "--max-power", "1"
    )
    assert code == 0
    assert "INCONCLUSIVE-PASS" in out


def test_module_fixture_flatness(capsys):
    code, out, _ = _run(capsys, "--input", str(FIXTURES / "module_torsion.alg"))
    assert code == 0
    assert "NOT FLAT" in out
    assert "certificate v = (" in out
