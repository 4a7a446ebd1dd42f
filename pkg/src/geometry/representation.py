# src/geometry/representation.py

"""
Explicit line matrices A, B, C in SL(2, C) realising a parameter triple

    rho0 = tr(AB),  rho1 = tr(AC),  rho2 = tr(BC)

with A, B in a fixed normal form (fixed points +-1/beta and +-beta on the
Riemann sphere) and C solved from the two remaining traces.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.traces.words import Word

DEGENERACY_TOL = 1e-12
LINE_MATRIX_TOL = 1e-9
VERIFY_TOL = 1e-6

IDENTITY = np.eye(2, dtype=complex)


class DegenerateAxesError(ValueError):
    """rho0^2 = 4: the axes of A and B meet at infinity or coincide"""


class NotALineMatrixError(ValueError):
    """Matrix is not a trace-zero element of SL(2, C)"""


class VanishingAbcTraceWarning(UserWarning):
    """tr(ABC) is numerically zero, so its sign carries no information"""


def normalize_distance(mu: complex) -> complex:
    """Representative with Re >= 0 and Im in [0, 2*pi)"""
    mu = complex(mu)
    if mu.real < 0:
        mu = -mu
    angle = float(np.mod(mu.imag, 2 * np.pi))
    if mu.real == 0 and angle > np.pi:
        # purely imaginary: mu and -mu are the same distance
        angle = 2 * np.pi - angle
    return complex(mu.real, angle)


def distance_from_trace(rho: complex) -> complex:
    """mu with rho = -2 cosh(mu)"""
    return normalize_distance(np.arccosh(np.complex128(-rho / 2)))


@dataclass(frozen=True)
class Parameters:
    rho0: complex
    rho1: complex
    rho2: complex

    @classmethod
    def from_mu(cls, mu0: complex, mu1: complex, mu2: complex) -> "Parameters":
        return cls(*(complex(-2 * np.cosh(np.complex128(m))) for m in (mu0, mu1, mu2)))

    @property
    def rho(self) -> Tuple[complex, complex, complex]:
        return (complex(self.rho0), complex(self.rho1), complex(self.rho2))

    @property
    def mu(self) -> Tuple[complex, complex, complex]:
        return tuple(distance_from_trace(r) for r in self.rho)

    def to_json(self) -> Dict[str, List[List[float]]]:
        return {"rho": [[r.real, r.imag] for r in self.rho]}

    @classmethod
    def from_json(cls, data: Dict) -> "Parameters":
        if "rho" in data:
            return cls(*(complex(re, im) for re, im in data["rho"]))
        if "mu" in data:
            return cls.from_mu(*(complex(re, im) for re, im in data["mu"]))
        raise ValueError("parameters need a 'rho' or 'mu' list")


@dataclass(frozen=True)
class Representation:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    beta: complex
    c11: complex
    c12: complex
    c21: complex
    params: Parameters

    @property
    def generators(self) -> Dict[str, np.ndarray]:
        return {"a": self.A, "b": self.B, "c": self.C}

    @property
    def abc_trace(self) -> complex:
        return complex(np.trace(self.A @ self.B @ self.C))


def build_representation(params: Parameters) -> Representation:
    rho0, rho1, rho2 = params.rho
    if abs(rho0 * rho0 - 4) < DEGENERACY_TOL:
        raise DegenerateAxesError(f"rho0 = {rho0} gives rho0^2 = 4")

    root = np.sqrt(np.complex128(rho0 * rho0 - 4))
    beta = complex(np.sqrt((-rho0 + root) / 2))
    if abs(beta) < 1:
        beta = 1 / beta

    denom = 1j / beta**2 - 1j * beta**2
    c21 = (rho1 / beta - rho2 * beta) / denom
    c12 = (-rho1 * beta + rho2 / beta) / denom
    c11 = complex(1j * np.sqrt(np.complex128(c12 * c21 + 1)))

    A = np.array([[0, 1j / beta], [1j * beta, 0]], dtype=complex)
    B = np.array([[0, 1j * beta], [1j / beta, 0]], dtype=complex)
    C = np.array([[c11, c12], [c21, -c11]], dtype=complex)
    return Representation(A, B, C, beta, c11, complex(c12), complex(c21), params)


def eval_word_matrix(rep: Representation, word: Word) -> np.ndarray:
    """Product of generator matrices; a line matrix is its own inverse up to sign"""
    generators = rep.generators
    result = IDENTITY.copy()
    for letter in word:
        matrix = generators[letter.generator]
        result = result @ (-matrix if letter.inverted else matrix)
    return result


def is_line_matrix(matrix: np.ndarray, tol: float = LINE_MATRIX_TOL) -> bool:
    return (
        abs(np.trace(matrix)) <= tol and abs(np.linalg.det(matrix) - 1) <= tol
    )


def complex_distance(m1: np.ndarray, m2: np.ndarray) -> complex:
    """Complex distance between the axes of two line matrices"""
    for matrix in (m1, m2):
        if not is_line_matrix(matrix):
            raise NotALineMatrixError(f"not a line matrix:\n{matrix}")
    return distance_from_trace(complex(np.trace(m1 @ m2)))


def mobius(matrix: np.ndarray, z: complex) -> complex:
    (a, b), (c, d) = matrix
    if np.isinf(z):
        return a / c if c != 0 else complex("inf")
    denom = c * z + d
    return (a * z + b) / denom if denom != 0 else complex("inf")


def fixed_points(matrix: np.ndarray) -> Tuple[complex, complex]:
    """Endpoints of the axis: roots of c z^2 + (d - a) z - b = 0"""
    (a, b), (c, d) = matrix
    if abs(c) < DEGENERACY_TOL:
        return (complex(-b / (d - a)), complex("inf"))
    disc = np.sqrt(np.complex128((d - a) ** 2 + 4 * b * c))
    return (complex((a - d + disc) / (2 * c)), complex((a - d - disc) / (2 * c)))


@dataclass(frozen=True)
class RelatorReport:
    words: Tuple[str, ...]
    residuals: Tuple[float, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals)

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def to_json(self) -> Dict:
        return {
            "passed": self.passed,
            "max_residual": self.max_residual,
            "relators": [
                {"word": w, "residual": r} for w, r in zip(self.words, self.residuals)
            ],
        }


def verify_relators(
    rep: Representation, relators: Sequence[Word], tol: float = VERIFY_TOL
) -> RelatorReport:
    """A relator holds in PSL(2, C) when its matrix is +I or -I"""
    residuals = []
    for word in relators:
        matrix = eval_word_matrix(rep, word)
        residuals.append(
            float(
                min(
                    np.abs(matrix - IDENTITY).max(),
                    np.abs(matrix + IDENTITY).max(),
                )
            )
        )
    return RelatorReport(tuple(str(w) for w in relators), tuple(residuals), tol)
