# src/geometry/two_generator.py

"""
Bridge to two-generator parameters: f = AC, g = CB generate the
orientation-preserving part of <A, B, C> (index 1 or 2).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

import numpy as np

from src.geometry.representation import Parameters, Representation


class IndexNote(str, Enum):
    INDEX_1 = "index 1"
    INDEX_2 = "index 2"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class GMParams:
    """(beta(f), beta(g), gamma(f, g)) with beta = tr^2 - 4, gamma = tr[f, g] - 2"""

    beta_f: complex
    beta_g: complex
    gamma: complex

    def to_json(self) -> Dict[str, list]:
        return {
            name: [value.real, value.imag]
            for name, value in (
                ("beta_f", self.beta_f),
                ("beta_g", self.beta_g),
                ("gamma", self.gamma),
            )
        }


def to_gm(params: Parameters) -> GMParams:
    rho0, rho1, rho2 = params.rho
    gamma = rho0**2 + rho1**2 + rho2**2 + rho0 * rho1 * rho2 - 4
    return GMParams(rho1**2 - 4, rho2**2 - 4, gamma)


def two_generator_pair(rep: Representation) -> Tuple[np.ndarray, np.ndarray]:
    return rep.A @ rep.C, rep.C @ rep.B


def commutator_trace(f: np.ndarray, g: np.ndarray) -> complex:
    return complex(np.trace(f @ g @ np.linalg.inv(f) @ np.linalg.inv(g)))


def index_note(rep: Representation) -> Tuple[IndexNote, str]:
    """
    The orientation-preserving subgroup <f, g> has index 1 or 2 in <A, B, C>
    depending on whether a lies in it. Word problems in the group are out of
    reach here, so the note is always undetermined.
    """
    return (
        IndexNote.UNDETERMINED,
        "index of <f, g> in <A, B, C> is 1 or 2; membership of a is not decided",
    )
