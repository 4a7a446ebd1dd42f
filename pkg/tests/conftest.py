import json
from pathlib import Path

import numpy as np
import pytest

from src.geometry.representation import Parameters, build_representation
from src.systems.algebraic import IdConfig
from src.systems.cases import load_case_spec
from src.systems.solver import SolverConfig

FIXTURES = Path(__file__).resolve().parent.parent / "data" / "fixtures"


def load_expected(name: str) -> dict:
    with open(FIXTURES / "expected" / f"{name}.json") as f:
        return json.load(f)


def as_point(pairs) -> tuple:
    return tuple(complex(re, im) for re, im in pairs)


def matches_up_to_symmetry(point, target, tol: float) -> bool:
    """Equal up to complex conjugation and sign flips of one generator"""
    point, target = np.array(point), np.array(target)
    for signs in ((1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1)):
        for candidate in (target, np.conj(target)):
            if np.abs(point - candidate * np.array(signs)).max() <= tol:
                return True
    return False


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def case_spec():
    def _load(name: str):
        return load_case_spec(FIXTURES / "cases" / f"{name}.json")

    return _load


@pytest.fixture
def generic_params() -> Parameters:
    return Parameters(0.7 + 1.3j, -1.1 + 0.4j, 2.2 - 0.9j)


@pytest.fixture
def generic_rep(generic_params):
    return build_representation(generic_params)


@pytest.fixture
def random_params():
    rng = np.random.default_rng(20240613)

    def _draw(count: int):
        values = rng.uniform(-2.5, 2.5, size=(count, 3)) + 1j * rng.uniform(
            -2.5, 2.5, size=(count, 3)
        )
        return [Parameters(*row) for row in values]

    return _draw


@pytest.fixture
def fast_solver() -> SolverConfig:
    return SolverConfig(starts=400, rng_seed=0)


@pytest.fixture
def small_id() -> IdConfig:
    return IdConfig(max_degree=4, max_height=6)


@pytest.fixture(autouse=True)
def pinned_timestamp(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
