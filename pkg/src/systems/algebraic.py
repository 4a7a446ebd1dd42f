# src/systems/algebraic.py

"""
Recognise a floating complex number as a root of a small integer polynomial.

Candidates are scanned by degree, then height (max |coefficient|), then
lexicographically on the coefficient list (lowest degree first). The two
lowest coefficients are solved from the rest by rounding, so each
(degree, height) shell costs (2h + 1)^(d - 2) numpy evaluations.
"""

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import sympy as sp
from tqdm import tqdm

T = sp.Symbol("t")

REAL_VALUE_TOL = 1e-12
# free coefficients enumerated as one numpy block; higher ones loop in Python
VECTOR_COLUMNS = 4


@dataclass(frozen=True)
class IdConfig:
    max_degree: int = 8
    max_height: int = 12
    accept_tol: float = 1e-6
    progress: bool = False
    # candidate polynomials evaluated before the search gives up
    max_evaluations: int = 4_000_000


@dataclass(frozen=True)
class MinPolyResult:
    coefficients: Tuple[int, ...]  # lowest degree first
    witness_error: float

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def height(self) -> int:
        return max(abs(c) for c in self.coefficients)

    def as_poly(self) -> sp.Poly:
        return sp.Poly(list(reversed(self.coefficients)), T, domain=sp.ZZ)

    def __str__(self) -> str:
        return str(self.as_poly().as_expr())

    def to_json(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "polynomial": str(self),
            "degree": self.degree,
            "height": self.height,
            "witness_error": self.witness_error,
        }


def identify(
    value: complex, config: Optional[IdConfig] = None
) -> Optional[MinPolyResult]:
    """
    Smallest (degree, height, lexicographic) primitive integer polynomial with
    positive leading coefficient and no linear factor (for degree >= 2) that
    vanishes at value within accept_tol. None when nothing qualifies, or
    when the next shell would exceed max_evaluations; shells are never
    skipped, so a result is always the smallest one.
    """
    config = config or IdConfig()
    value = complex(value)
    spent = 0
    degrees = range(1, config.max_degree + 1)
    for degree in tqdm(degrees, desc="degree", disable=not config.progress):
        for height in range(1, config.max_height + 1):
            cost = shell_cost(value, degree, height)
            if spent + cost > config.max_evaluations:
                return None
            spent += cost
            found = _scan_shell(value, degree, height, config.accept_tol)
            if found is not None:
                return found
    return None


def identify_squared(
    value: complex, config: Optional[IdConfig] = None
) -> Optional[MinPolyResult]:
    """identify(value^2); useful when only the square is a sign-free invariant"""
    return identify(complex(value) ** 2, config)


def shell_cost(value: complex, degree: int, height: int) -> int:
    """Candidate polynomials checked in one (degree, height) shell"""
    is_real = abs(complex(value).imag) <= REAL_VALUE_TOL
    if degree == 1:
        return height if is_real else 0
    count = degree - (1 if is_real else 2)
    return height * (2 * height + 1) ** count


def _scan_shell(
    value: complex, degree: int, height: int, tol: float
) -> Optional[MinPolyResult]:
    is_real = abs(value.imag) <= REAL_VALUE_TOL
    if degree == 1:
        return _scan_linear(value, height, tol) if is_real else None

    # free coefficients a_2 .. a_d (and a_1 too when the value is real)
    lowest_free = 1 if is_real else 2
    powers = np.array([value**j for j in range(lowest_free, degree + 1)])
    span = np.arange(-height, height + 1)

    count = degree - lowest_free
    inner = min(count, VECTOR_COLUMNS)
    inner_grid = np.array(
        list(itertools.product(span, repeat=inner)), dtype=np.int64
    ).reshape(len(span) ** inner, inner)

    accepted: List[Tuple[int, ...]] = []
    errors = {}
    outer_rows = itertools.product(span, repeat=count - inner)
    for leading, outer in itertools.product(range(1, height + 1), outer_rows):
        # column order: inner (lowest) coefficients, outer ones, leading
        fixed = np.array(outer + (leading,), dtype=np.int64)
        free = np.hstack([inner_grid, np.tile(fixed, (len(inner_grid), 1))])
        partial = free @ powers

        if is_real:
            a0 = _round_bounded(-partial.real, height)
            coeffs = np.column_stack([a0, free])
            lower_ok = np.abs(a0) <= height
        else:
            a1 = _round_bounded(-partial.imag / value.imag, height)
            a0 = _round_bounded(-partial.real - a1 * value.real, height)
            coeffs = np.column_stack([a0, a1, free])
            lower_ok = (np.abs(a0) <= height) & (np.abs(a1) <= height)

        error = np.abs(partial + a0) if is_real else np.abs(partial + a1 * value + a0)
        shell = np.abs(coeffs).max(axis=1) == height
        hits = np.flatnonzero(lower_ok & shell & (error <= tol))
        for index in hits:
            row = tuple(int(c) for c in coeffs[index])
            accepted.append(row)
            errors[row] = float(error[index])

    for row in sorted(accepted):
        if _admissible(row):
            return MinPolyResult(row, errors[row])
    return None


def _scan_linear(
    value: complex, height: int, tol: float
) -> Optional[MinPolyResult]:
    accepted = []
    for a1 in range(1, height + 1):
        a0 = int(round(-a1 * value.real))
        error = abs(a1 * value + a0)
        if abs(a0) <= height and max(abs(a0), a1) == height and error <= tol:
            accepted.append(((a0, a1), error))
    for row, error in sorted(accepted):
        if math.gcd(*row) == 1:
            return MinPolyResult(row, float(error))
    return None


def _admissible(coefficients: Tuple[int, ...]) -> bool:
    """Primitive and free of rational roots"""
    if math.gcd(*coefficients) != 1:
        return False
    poly = sp.Poly(list(reversed(coefficients)), T, domain=sp.ZZ)
    _, factors = poly.factor_list()
    return all(factor.degree() >= 2 for factor, _ in factors)


def _round_bounded(values: np.ndarray, height: int) -> np.ndarray:
    """Nearest integers, clipped just outside the shell so int64 cannot overflow"""
    return np.clip(np.rint(values), -height - 1, height + 1).astype(np.int64)
