# src/traces/ring.py

"""
Trace ring R = Z[x, y, z] + w Z[x, y, z] with w^2 = F(x, y, z).

x = tr(AB), y = tr(AC), z = tr(BC), w = tr(ABC) and
F = 4 - x^2 - y^2 - z^2 - xyz (the Fricke relation for line matrices).
"""

from dataclasses import dataclass
from typing import Dict, List

import sympy as sp
from sympy import Poly

X, Y, Z = sp.symbols("x y z")
W = sp.Symbol("w")
GENS = (X, Y, Z)


def poly3(expr) -> Poly:
    """Integer polynomial in x, y, z"""
    return Poly(expr, *GENS, domain=sp.ZZ)


def fricke_poly() -> Poly:
    return poly3(4 - X**2 - Y**2 - Z**2 - X * Y * Z)


ZERO = poly3(0)
FRICKE = fricke_poly()


@dataclass(frozen=True)
class TraceElement:
    """P + w*R with P, R integer polynomials in x, y, z"""

    even: Poly
    odd: Poly

    @classmethod
    def from_exprs(cls, even, odd=0) -> "TraceElement":
        return cls(poly3(even), poly3(odd))

    @classmethod
    def constant(cls, value: int) -> "TraceElement":
        return cls(poly3(value), ZERO)

    @classmethod
    def w(cls) -> "TraceElement":
        return cls(ZERO, poly3(1))

    @property
    def is_zero(self) -> bool:
        return self.even.is_zero and self.odd.is_zero

    @property
    def is_even(self) -> bool:
        return self.odd.is_zero

    @property
    def is_odd(self) -> bool:
        return self.even.is_zero and not self.odd.is_zero

    def __add__(self, other: "TraceElement") -> "TraceElement":
        return TraceElement(self.even + other.even, self.odd + other.odd)

    def __sub__(self, other: "TraceElement") -> "TraceElement":
        return TraceElement(self.even - other.even, self.odd - other.odd)

    def __neg__(self) -> "TraceElement":
        return TraceElement(-self.even, -self.odd)

    def __mul__(self, other: "TraceElement") -> "TraceElement":
        # (P1 + w R1)(P2 + w R2) = P1 P2 + F R1 R2 + w (P1 R2 + R1 P2)
        even = self.even * other.even + FRICKE * self.odd * other.odd
        odd = self.even * other.odd + self.odd * other.even
        return TraceElement(even, odd)

    def as_expr(self) -> sp.Expr:
        return self.even.as_expr() + W * self.odd.as_expr()

    def __str__(self) -> str:
        return str(sp.expand(self.as_expr()))


def serialize_poly(poly: Poly) -> List[List[int]]:
    """Terms as [i, j, k, coeff] in descending graded-lex order, zeros dropped"""
    return [
        [int(i), int(j), int(k), int(coeff)]
        for (i, j, k), coeff in poly.terms(order="grlex")
        if coeff != 0
    ]


def deserialize_poly(terms: List[List[int]]) -> Poly:
    if not terms:
        return ZERO
    return Poly.from_dict({(i, j, k): c for i, j, k, c in terms}, *GENS, domain=sp.ZZ)


def trace_to_json(element: TraceElement) -> Dict[str, List[List[int]]]:
    return {"even": serialize_poly(element.even), "odd": serialize_poly(element.odd)}


def trace_from_json(data: Dict[str, List[List[int]]]) -> TraceElement:
    return TraceElement(deserialize_poly(data["even"]), deserialize_poly(data["odd"]))
