import argparse
import json

import pytest

from src.cli import (
    EXIT_COMPUTATION,
    EXIT_OK,
    EXIT_USAGE,
    main,
    parse_complex,
    parse_orders,
)
from src.utils.db import ResultsDB


def run(capsys, *argv):
    code = main(["--quiet", *argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def result_of(out: str):
    return json.loads(out)["result"]


def test_trace_prints_envelope(capsys):
    code, out, _ = run(capsys, "trace", "bab'cbc'aca'")
    assert code == EXIT_OK
    envelope = json.loads(out)
    assert envelope["manifest"]["subcommand"] == "trace"
    assert envelope["manifest"]["inputs"] == {"word": "bab'cbc'aca'"}
    assert envelope["manifest"]["timestamp"] == "2023-11-14T22:13:20+00:00"
    assert envelope["result"]["odd"] == [[1, 1, 1, -1], [0, 0, 0, -1]]


def test_bad_word_is_a_usage_error(capsys):
    code, out, err = run(capsys, "trace", "abd")
    assert code == EXIT_USAGE
    assert out == ""
    assert "position 3" in err


def test_unknown_flag_exits_with_usage_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["trace", "ab", "--frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_degenerate_parameters_are_a_computation_error(capsys):
    code, _, err = run(capsys, "repr", "--rho0", "2", "--rho1", "0", "--rho2", "0")
    assert code == EXIT_COMPUTATION
    assert "DegenerateAxesError" in err


def test_missing_parameters(capsys):
    code, _, err = run(capsys, "repr", "--rho0", "1")
    assert code == EXIT_USAGE
    assert "--rho0..2" in err


def test_repr_and_verify(capsys, generic_params):
    rho = [f"{r.real},{r.imag}" for r in generic_params.rho]
    args = [f"--rho{i}={value}" for i, value in enumerate(rho)]
    code, out, _ = run(capsys, "repr", *args)
    assert code == EXIT_OK
    assert set(result_of(out)) >= {"A", "B", "C", "beta", "abc_trace"}

    code, out, _ = run(capsys, "verify", *args, "--relators", "aa", "bb", "cc")
    assert code == EXIT_OK
    assert result_of(out)["passed"] is True


def test_identify(capsys):
    code, out, _ = run(capsys, "identify", "--re", "-1", "--im", "-1", "--squared")
    assert code == EXIT_OK
    result = result_of(out)
    assert result["found"] is True
    assert result["coefficients"] == [4, 0, 1]


def test_identify_out_of_bounds(capsys):
    code, out, _ = run(
        capsys,
        "identify",
        "--re",
        "3.14159265358979",
        "--max-degree",
        "2",
        "--max-height",
        "3",
    )
    assert code == EXIT_OK
    assert result_of(out) == {"found": False, "coefficients": None}


def test_abelianize(capsys, fixtures_dir):
    path = str(fixtures_dir / "presentations" / "picard3.json")
    code, out, _ = run(capsys, "abelianize", path, "--claimed-rank", "2")
    assert code == EXIT_OK
    result = result_of(out)
    assert result["torsion"] == [2, 2]
    assert result["rank_check"] is True


def test_missing_file_is_a_usage_error(capsys, tmp_path):
    code, _, _ = run(capsys, "abelianize", str(tmp_path / "nope.json"))
    assert code == EXIT_USAGE


def test_identical_runs_print_identical_bytes(capsys, fixtures_dir):
    spec = str(fixtures_dir / "cases" / "6E.json")
    _, first, _ = run(capsys, "solve", spec, "--starts", "80", "--seed", "3")
    _, second, _ = run(capsys, "solve", spec, "--starts", "80", "--seed", "3")
    assert first == second
    manifest = json.loads(first)["manifest"]
    assert manifest["seed"] == 3
    assert manifest["overrides"]["starts"] == 80


def test_pipeline_with_no_candidates_records_run(capsys, fixtures_dir, tmp_path):
    db_path = str(tmp_path / "runs.duckdb")
    code, out, _ = run(
        capsys,
        "pipeline",
        str(fixtures_dir / "cases" / "6B.json"),
        "--order",
        "2",
        "--starts",
        "200",
        "--db",
        db_path,
    )
    assert code == EXIT_OK
    result = result_of(out)
    assert result["candidates"] == []
    assert result["message"] == "no complex candidates"
    assert result["orders"][1] == 2

    db = ResultsDB(db_path)
    runs = db.query("SELECT subcommand, candidates FROM runs")
    db.close()
    assert runs.to_dict(orient="records") == [{"subcommand": "pipeline", "candidates": 0}]


def test_parse_complex_forms():
    assert parse_complex("0.5,-1") == 0.5 - 1j
    assert parse_complex("0.5+0.866i") == pytest.approx(0.5 + 0.866j)
    assert parse_complex("2") == 2
    with pytest.raises(argparse.ArgumentTypeError):
        parse_complex("one")


def test_parse_orders():
    assert parse_orders("3,4, inf") == [3, 4, "inf"]


def test_bundled_fixture_by_name(capsys, monkeypatch, fixtures_dir):
    monkeypatch.setenv("TRIANGLE_FIXTURES_DIR", str(fixtures_dir))
    code, out, _ = run(capsys, "abelianize", "abc_involutions")
    assert code == EXIT_OK
    assert result_of(out)["torsion"] == [2, 2, 2]


def test_verify_with_case_relators(capsys, monkeypatch, fixtures_dir):
    monkeypatch.setenv("TRIANGLE_FIXTURES_DIR", str(fixtures_dir))
    rho = "0.5,0.8660254037844386"
    args = [f"--rho{i}={rho}" for i in range(3)]
    code, out, _ = run(capsys, "verify", *args, "--case", "6G")
    assert code == EXIT_OK
    assert result_of(out)["passed"] is True


def test_reruns_are_identical_without_a_pinned_date(capsys, monkeypatch, fixtures_dir):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    spec = str(fixtures_dir / "cases" / "6E.json")
    _, first, _ = run(capsys, "solve", spec, "--starts", "60")
    _, second, _ = run(capsys, "solve", spec, "--starts", "60")
    assert first == second
    assert json.loads(first)["manifest"]["timestamp"] is None


def test_run_history_keeps_the_wall_clock(capsys, monkeypatch, fixtures_dir, tmp_path):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    db_path = str(tmp_path / "runs.duckdb")
    spec = str(fixtures_dir / "cases" / "6B.json")
    code = main(["pipeline", spec, "--order", "2", "--starts", "100", "--db", db_path])
    err = capsys.readouterr().err
    assert code == EXIT_OK
    assert "DATABASE SUMMARY" in err
    assert "runs" in err

    db = ResultsDB(db_path)
    (stamp,) = db.query("SELECT timestamp FROM runs")["timestamp"].tolist()
    db.close()
    assert stamp.endswith("+00:00")


@pytest.mark.parametrize(
    "data",
    [
        {"case": "B"},
        {"constraints": [{"word": "ab", "rhs": "order", "t": 1}] * 3},
    ],
)
def test_malformed_case_spec_is_a_usage_error(capsys, tmp_path, data):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, err = run(capsys, "pipeline", str(path))
    assert code == EXIT_USAGE
    assert out == ""
    assert err.startswith("error:")
