# src/utils/config.py

"""
Runtime defaults from the environment (and an optional .env file)
"""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _flag(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    starts: int = 2000
    residual_tol: float = 1e-10
    sample_radius: float = 3.0
    json_indent: int = 2
    db_path: str = "data/processed/triangle_runs.duckdb"
    fixtures_dir: str = "data/fixtures"
    quiet: bool = False


def get_settings() -> Settings:
    """Read TRIANGLE_* variables; anything unset keeps its default"""
    env = os.environ
    defaults = Settings()
    return Settings(
        seed=int(env.get("TRIANGLE_SEED", defaults.seed)),
        starts=int(env.get("TRIANGLE_STARTS", defaults.starts)),
        residual_tol=float(env.get("TRIANGLE_TOL", defaults.residual_tol)),
        sample_radius=float(env.get("TRIANGLE_RADIUS", defaults.sample_radius)),
        json_indent=int(env.get("TRIANGLE_JSON_INDENT", defaults.json_indent)),
        db_path=env.get("TRIANGLE_DB_PATH", defaults.db_path),
        fixtures_dir=env.get("TRIANGLE_FIXTURES_DIR", defaults.fixtures_dir),
        quiet=_flag(env.get("TRIANGLE_QUIET", "0")),
    )
