# src/groups/presentation.py

"""
Finite presentations and their abelianizations, via the Smith normal form of
the exponent-sum matrix over Z.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import sympy as sp
from sympy.matrices.normalforms import smith_normal_form

from src.traces.words import Word, WordSyntaxError, parse_word


class PresentationError(ValueError):
    """Malformed presentation (bad generator symbols or relator letters)"""


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...] = ()
    name: str = ""

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if len(set(gens)) != len(gens):
            raise PresentationError(f"repeated generator symbols in {gens}")
        for symbol in gens:
            if len(symbol) != 1 or not symbol.isalpha():
                raise PresentationError(
                    f"generator symbols must be single letters, got {symbol!r}"
                )
        for word in self.relators:
            stray = set(word.generators) - set(gens)
            if stray:
                raise PresentationError(f"relator {word} uses undeclared {sorted(stray)}")

    @classmethod
    def parse(
        cls, generators: Sequence[str], relators: Sequence[str], name: str = ""
    ) -> "Presentation":
        try:
            words = tuple(parse_word(text, alphabet=generators) for text in relators)
        except WordSyntaxError as exc:
            raise PresentationError(str(exc)) from exc
        return cls(tuple(generators), words, name)

    def __str__(self) -> str:
        body = ", ".join(str(w) for w in self.relators)
        return f"<{', '.join(self.generators)} | {body}>"

    def to_json(self) -> Dict:
        return {
            "name": self.name,
            "generators": list(self.generators),
            "relators": [str(w) for w in self.relators],
        }


def presentation_from_json(data: Mapping) -> Presentation:
    try:
        return Presentation.parse(
            data["generators"], data.get("relators", []), data.get("name", "")
        )
    except KeyError as exc:
        raise PresentationError(f"presentation is missing field {exc}") from exc


def load_presentation(path: Union[str, Path]) -> Presentation:
    with open(path) as f:
        return presentation_from_json(json.load(f))


@dataclass(frozen=True)
class AbelianInvariants:
    """Z^free_rank + Z_t1 + ... + Z_tk with t1 | t2 | ... | tk, all ti > 1"""

    free_rank: int
    torsion: Tuple[int, ...] = ()

    @property
    def rank(self) -> int:
        """Minimal number of generators of the abelian group"""
        return self.free_rank + len(self.torsion)

    @property
    def is_torsion_free(self) -> bool:
        return not self.torsion

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z_{t}" for t in self.torsion]
        return " + ".join(parts) or "0"

    def to_json(self) -> Dict:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "rank": self.rank,
            "group": str(self),
        }


def relation_matrix(presentation: Presentation) -> sp.Matrix:
    """Row per relator, column per generator: signed exponent sums"""
    index = {g: i for i, g in enumerate(presentation.generators)}
    rows: List[List[int]] = []
    for word in presentation.relators:
        row = [0] * len(index)
        for letter in word:
            row[index[letter.generator]] += -1 if letter.inverted else 1
        rows.append(row)
    return sp.Matrix(rows) if rows else sp.zeros(0, len(index))


def abelianize(presentation: Presentation) -> AbelianInvariants:
    n = len(presentation.generators)
    matrix = relation_matrix(presentation)
    if matrix.rows == 0 or matrix.is_zero_matrix:
        return AbelianInvariants(free_rank=n)

    snf = smith_normal_form(matrix, domain=sp.ZZ)
    diagonal = [abs(int(snf[i, i])) for i in range(min(snf.shape))]
    nonzero = [d for d in diagonal if d != 0]
    torsion = tuple(sorted(d for d in nonzero if d > 1))
    return AbelianInvariants(free_rank=n - len(nonzero), torsion=torsion)


def rank_lower_bound_check(presentation: Presentation, claimed_rank: int) -> bool:
    """
    True when the claim is compatible with the abelianization, i.e. the
    abelianized group needs at most claimed_rank generators.
    """
    return abelianize(presentation).rank <= claimed_rank
