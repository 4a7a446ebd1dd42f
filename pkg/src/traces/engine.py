# src/traces/engine.py

"""
Exact trace polynomials of words in three line matrices A, B, C.

Recursion on positive cyclically reduced words: for a word X u X v,
    tr(XuXv) = tr(Xu) tr(Xv) - tr(u^-1 v)
with every term strictly shorter, ending at tr() = 2, tr(X) = 0,
tr(XY) in {x, y, z} and tr(abc) = w, tr(acb) = -w.
"""

from functools import lru_cache
from typing import Tuple

from src.traces.ring import FRICKE, TraceElement, W, X, Y, Z
from src.traces.words import (
    SignedWord,
    Word,
    cyclic_canonical,
    invert,
    normalize,
)

_PAIR_TRACES = {("a", "b"): X, ("a", "c"): Y, ("b", "c"): Z}

CONSISTENCY_TOL = 1e-6


class InconsistentPointError(ValueError):
    """Raised when w^2 != F(x, y, z) at an evaluation point"""


def trace_of(word: Word) -> TraceElement:
    """Exact trace of any word, in the ring Z[x,y,z] + w Z[x,y,z]"""
    signed = cyclic_canonical(normalize(word))
    value = _canonical_trace(signed.word.generators)
    return value if signed.sign > 0 else -value


def _signed_trace(signed: SignedWord) -> TraceElement:
    canonical = cyclic_canonical(signed)
    value = _canonical_trace(canonical.word.generators)
    return value if canonical.sign > 0 else -value


# keyed by the canonical cyclic word; sign handled by the caller
@lru_cache(maxsize=None)
def _canonical_trace(gens: Tuple[str, ...]) -> TraceElement:
    n = len(gens)
    if n == 0:
        return TraceElement.constant(2)
    if n == 1:
        return TraceElement.constant(0)
    if n == 2:
        return TraceElement.from_exprs(_PAIR_TRACES[gens])
    if n == 3:
        return TraceElement.w() if gens == ("a", "b", "c") else -TraceElement.w()

    first, second = _pivot(gens)
    pivot = Word.positive(gens[first : first + 1])
    u = Word.positive(gens[first + 1 : second])
    v = Word.positive(gens[second + 1 :] + gens[:first])

    left = _signed_trace(normalize(pivot + u))
    right = _signed_trace(normalize(pivot + v))
    tail = _signed_trace(normalize(invert(u) + v))
    return left * right - tail


def _pivot(gens: Tuple[str, ...]) -> Tuple[int, int]:
    """First letter (in word order) that occurs again, with its next occurrence"""
    for i, generator in enumerate(gens):
        for j in range(i + 1, len(gens)):
            if gens[j] == generator:
                return i, j
    # a reduced word of length >= 4 over three letters always repeats one
    raise AssertionError(f"no repeated letter in {''.join(gens)}")


def trace_cache_info():
    return _canonical_trace.cache_info()


def clear_trace_cache() -> None:
    _canonical_trace.cache_clear()


def _eval_poly(poly, x: complex, y: complex, z: complex) -> complex:
    total = 0j
    for (i, j, k), coeff in poly.terms():
        if coeff:
            total += int(coeff) * x**i * y**j * z**k
    return total


def eval_trace(
    element: TraceElement, point: Tuple[complex, complex, complex, complex]
) -> complex:
    """
    Evaluate P + wR at (x, y, z, w). The point must satisfy w^2 = F(x, y, z)
    to relative tolerance 1e-6.
    """
    x, y, z, w = (complex(v) for v in point)
    fricke = _eval_poly(FRICKE, x, y, z)
    if abs(w * w - fricke) > CONSISTENCY_TOL * (1 + abs(fricke)):
        raise InconsistentPointError(
            f"w^2 = {w * w:.6g} differs from F(x, y, z) = {fricke:.6g}"
        )
    return _eval_poly(element.even, x, y, z) + w * _eval_poly(element.odd, x, y, z)


__all__ = [
    "InconsistentPointError",
    "TraceElement",
    "W",
    "clear_trace_cache",
    "eval_trace",
    "trace_cache_info",
    "trace_of",
]
