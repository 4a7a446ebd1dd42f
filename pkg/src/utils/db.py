from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Optional

import duckdb
import pandas as pd

from src.utils.reporting import Reporter

CANDIDATE_COLUMNS = [
    "run_id",
    "label",
    "x_re",
    "x_im",
    "y_re",
    "y_im",
    "z_re",
    "z_im",
    "residual",
    "flags",
    "relators_passed",
    "min_poly_x",
    "min_poly_x_squared",
]


class ResultsDB:
    """DuckDB store for pipeline runs and the candidates they report"""

    def __init__(
        self,
        db_path: str = "data/processed/triangle_runs.duckdb",
        reporter: Optional[Reporter] = None,
    ):
        self.db_path = db_path
        self.reporter = reporter or Reporter(quiet=True)
        if db_path != ":memory:":
            Path(db_path).parent.mkdir(parents=True, exist_ok=True)
        self.conn = duckdb.connect(db_path)
        self._create_tables()
        self.reporter.ok(f"Connected to database: {db_path}")

    def _create_tables(self):
        self.conn.execute(
            """
            CREATE TABLE IF NOT EXISTS runs (
                run_id INTEGER,
                subcommand VARCHAR,
                label VARCHAR,
                seed BIGINT,
                tool_version VARCHAR,
                timestamp VARCHAR,
                solutions_found INTEGER,
                candidates INTEGER
            )
        """
        )
        self.conn.execute(
            """
            CREATE TABLE IF NOT EXISTS candidates (
                run_id INTEGER,
                label VARCHAR,
                x_re DOUBLE,
                x_im DOUBLE,
                y_re DOUBLE,
                y_im DOUBLE,
                z_re DOUBLE,
                z_im DOUBLE,
                residual DOUBLE,
                flags VARCHAR,
                relators_passed BOOLEAN,
                min_poly_x VARCHAR,
                min_poly_x_squared VARCHAR
            )
        """
        )

    def _next_run_id(self) -> int:
        return self.conn.execute("SELECT COALESCE(MAX(run_id), 0) + 1 FROM runs").fetchone()[0]

    def record_run(self, manifest: Dict, report: Dict) -> int:
        """Store one pipeline report; returns its run id"""
        run_id = self._next_run_id()
        label = report.get("name", "")
        self.conn.execute(
            "INSERT INTO runs VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
            [
                run_id,
                manifest.get("subcommand"),
                label,
                manifest.get("seed"),
                manifest.get("tool_version"),
                manifest.get("timestamp") or _now(),
                report.get("solutions_found", 0),
                len(report.get("candidates", [])),
            ],
        )

        rows = []
        for candidate in report.get("candidates", []):
            (x_re, x_im), (y_re, y_im), (z_re, z_im) = candidate["point"]
            min_poly = candidate.get("min_poly", {})
            rows.append(
                {
                    "run_id": run_id,
                    "label": label,
                    "x_re": x_re,
                    "x_im": x_im,
                    "y_re": y_re,
                    "y_im": y_im,
                    "z_re": z_re,
                    "z_im": z_im,
                    "residual": candidate["residual"],
                    "flags": ",".join(candidate["flags"]),
                    "relators_passed": candidate.get("relators", {}).get("passed"),
                    "min_poly_x": _poly_text(min_poly.get("x")),
                    "min_poly_x_squared": _poly_text(min_poly.get("x_squared")),
                }
            )
        if rows:
            frame = pd.DataFrame(rows, columns=CANDIDATE_COLUMNS)
            self.conn.register("candidate_rows", frame)
            self.conn.execute("INSERT INTO candidates SELECT * FROM candidate_rows")
            self.conn.unregister("candidate_rows")

        self.reporter.ok(f"Stored run {run_id} ({label}) with {len(rows)} candidates")
        return run_id

    def print_summary(self):
        """Print table summaries"""
        self.reporter.line("\n📊 DATABASE SUMMARY:")
        self.reporter.line("─" * 60)
        for (table_name,) in self.conn.execute("SHOW TABLES").fetchall():
            count = self.conn.execute(f"SELECT COUNT() FROM {table_name}").fetchone()[0]
            self.reporter.line(f"  {table_name:25s}: {count:>10,} rows")

    def query(self, sql: str) -> pd.DataFrame:
        """Execute SQL and return DataFrame"""
        return self.conn.execute(sql).df()

    def close(self):
        """Close database connection"""
        self.conn.close()
        self.reporter.ok("Database connection closed")


def _now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def _poly_text(entry: Optional[Dict]) -> Optional[str]:
    return entry.get("polynomial") if entry else None
