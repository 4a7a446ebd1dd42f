import io
import json
import os
from enum import Enum

import numpy as np
import pytest
import sympy as sp

from src.utils.config import Settings, get_settings
from src.utils.db import ResultsDB
from src.utils.reporting import Reporter
from src.utils.serialization import complex_from_json, dumps, to_jsonable


def test_settings_defaults(monkeypatch):
    for name in list(os.environ):
        if name.startswith("TRIANGLE_"):
            monkeypatch.delenv(name)
    assert get_settings() == Settings()


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("TRIANGLE_SEED", "11")
    monkeypatch.setenv("TRIANGLE_STARTS", "50")
    monkeypatch.setenv("TRIANGLE_TOL", "1e-8")
    monkeypatch.setenv("TRIANGLE_QUIET", "yes")
    settings = get_settings()
    assert settings.seed == 11
    assert settings.starts == 50
    assert settings.residual_tol == 1e-8
    assert settings.quiet is True


def test_reporter_writes_banner_style():
    stream = io.StringIO()
    reporter = Reporter(stream=stream)
    reporter.banner("solve")
    reporter.step(2, 5, "Solving...")
    reporter.warn("curve")
    lines = stream.getvalue().splitlines()
    assert "=" * 60 in lines
    assert "SOLVE" in lines
    assert "[2/5] Solving..." in lines
    assert "⚠️  curve" in lines


def test_quiet_reporter_is_silent():
    stream = io.StringIO()
    Reporter(quiet=True, stream=stream).ok("done")
    assert stream.getvalue() == ""


class Color(Enum):
    RED = "red"


def test_to_jsonable():
    data = to_jsonable(
        {
            "z": 1 - 2j,
            "arr": np.array([1.5, 2.0]),
            "flags": frozenset({"b", "a"}),
            "expr": sp.Symbol("x") + 1,
            "color": Color.RED,
            3: np.int64(4),
        }
    )
    assert data == {
        "z": [1.0, -2.0],
        "arr": [1.5, 2.0],
        "flags": ["a", "b"],
        "expr": "x + 1",
        "color": "red",
        "3": 4,
    }
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_dumps_keeps_unicode():
    assert json.loads(dumps({"order": "∞"}, indent=0)) == {"order": "∞"}
    assert "∞" in dumps("∞")


def test_complex_from_json():
    assert complex_from_json([0.5, -1]) == 0.5 - 1j
    assert complex_from_json(3) == 3


def sample_report():
    return {
        "name": "6Z",
        "solutions_found": 4,
        "candidates": [
            {
                "point": [[0.5, 0.5], [1.0, -1.0], [0.0, 2.0]],
                "residual": 1e-13,
                "flags": ["complex_candidate", "conjugate"],
                "relators": {"passed": True},
                "min_poly": {"x": {"polynomial": "2*t**2 - 2*t + 1"}, "x_squared": None},
            }
        ],
    }


def test_results_db_round_trip():
    db = ResultsDB(":memory:")
    manifest = {"subcommand": "pipeline", "seed": 0, "tool_version": "0.1.0"}
    assert db.record_run(manifest, sample_report()) == 1
    assert db.record_run(manifest, {"name": "empty", "candidates": []}) == 2

    runs = db.query("SELECT run_id, label, candidates FROM runs ORDER BY run_id")
    assert runs["label"].tolist() == ["6Z", "empty"]
    assert runs["candidates"].tolist() == [1, 0]

    rows = db.query("SELECT * FROM candidates")
    assert len(rows) == 1
    row = rows.iloc[0]
    assert row["y_im"] == -1.0
    assert row["flags"] == "complex_candidate,conjugate"
    assert row["min_poly_x"] == "2*t**2 - 2*t + 1"
    assert row["min_poly_x_squared"] is None
    db.close()


def test_results_db_summary():
    stream = io.StringIO()
    db = ResultsDB(":memory:", Reporter(stream=stream))
    db.record_run({"subcommand": "pipeline"}, sample_report())
    db.print_summary()
    text = stream.getvalue()
    assert "DATABASE SUMMARY" in text
    assert "candidates" in text
    db.close()
