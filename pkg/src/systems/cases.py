# src/systems/cases.py

"""
Case specifications and polynomial system assembly

A case fixes three words (one per pair of singular-graph edges) and the
trace each must take. Each constraint becomes one polynomial equation in
x = tr(AB), y = tr(AC), z = tr(BC).
"""

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp
from sympy import Poly

from src.traces.engine import trace_of
from src.traces.ring import FRICKE, GENS
from src.traces.words import Word, parse_word

Order = Union[int, str]
INFINITY = "inf"


class CaseSpecError(ValueError):
    """Malformed or inconsistent case specification"""


class CaseSpecFormatError(CaseSpecError):
    """Case spec file that does not describe a case: bad fields, kinds or orders"""


class MixedParityError(ValueError):
    """Trace has both an even and a w part; words of mixed parity are invalid"""


class InvalidOrderError(ValueError):
    """Order must be an integer >= 2, infinity, or a parameter name"""


class RhsKind(str, Enum):
    TRIVIAL = "trivial"
    ORDER = "order"
    PARABOLIC = "parabolic"
    HALF_TURN = "half_turn"


class CaseId(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    G = "G"
    H = "H"
    CUSTOM = "Custom"


class Provenance(str, Enum):
    DIRECT = "direct"
    ODD_SQUARED = "odd-squared"
    ODD_FACTORED = "odd-factored"


def _check_order(order) -> Order:
    if isinstance(order, bool):
        raise InvalidOrderError(f"invalid order {order!r}")
    if isinstance(order, float) and math.isinf(order):
        return INFINITY
    if isinstance(order, float) and order.is_integer():
        order = int(order)
    if isinstance(order, int):
        if order < 2:
            raise InvalidOrderError(f"order must be >= 2, got {order}")
        return order
    if isinstance(order, str):
        text = order.strip()
        if text.lower() in ("inf", "infinity", "oo", "∞"):
            return INFINITY
        if text.isdigit():
            return _check_order(int(text))
        if text.isidentifier():
            return text
    raise InvalidOrderError(f"invalid order {order!r}")


def rhs_value(kind: RhsKind, t: Optional[Order] = None) -> sp.Expr:
    """Exact trace value: Trivial 2, Parabolic -2, HalfTurn 0, Order(t) -2cos(pi/t)"""
    kind = RhsKind(kind)
    if kind is RhsKind.TRIVIAL:
        return sp.Integer(2)
    if kind is RhsKind.PARABOLIC:
        return sp.Integer(-2)
    if kind is RhsKind.HALF_TURN:
        return sp.Integer(0)
    if t is None:
        raise InvalidOrderError("Order constraint needs an order")
    t = _check_order(t)
    if t == INFINITY:
        return sp.Integer(-2)
    if isinstance(t, str):
        return -2 * sp.cos(sp.pi / sp.Symbol(t, positive=True))
    return -2 * sp.cos(sp.pi / t)


@dataclass(frozen=True)
class TraceConstraint:
    word: Word
    kind: RhsKind
    order: Optional[Order] = None
    # False: the word is pinned by its trace only and never checked as a matrix relator
    relator: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", RhsKind(self.kind))
        if self.kind is RhsKind.ORDER:
            object.__setattr__(self, "order", _check_order(self.order))

    @property
    def rhs(self) -> sp.Expr:
        return rhs_value(self.kind, self.order)

    @property
    def effective_order(self) -> Optional[Order]:
        """Order of the element: HalfTurn is 2, Parabolic is infinite, Trivial has none"""
        if self.kind is RhsKind.HALF_TURN:
            return 2
        if self.kind is RhsKind.PARABOLIC:
            return INFINITY
        return self.order

    @property
    def value_class(self) -> str:
        order = self.effective_order
        if self.kind is RhsKind.TRIVIAL:
            return "trivial"
        if order == 2:
            return "half"
        if order == INFINITY:
            return "parabolic"
        return "elliptic"

    @property
    def parameter(self) -> Optional[str]:
        if self.kind is RhsKind.ORDER and isinstance(self.order, str):
            if self.order != INFINITY:
                return self.order
        return None

    def bind(self, values: Mapping[str, Order]) -> "TraceConstraint":
        name = self.parameter
        if name is None or name not in values:
            return self
        return replace(self, order=_check_order(values[name]))

    def to_json(self) -> Dict:
        data = {"word": str(self.word), "rhs": self.kind.value}
        if self.kind is RhsKind.ORDER:
            data["t"] = self.order
        if not self.relator:
            data["relator"] = False
        return data


_ORDER_LIKE = frozenset({"half", "parabolic", "elliptic"})

# allowed value classes per constraint position, and the position of the odd word
_CASE_PATTERNS: Dict[CaseId, Tuple[Tuple[frozenset, ...], Optional[int]]] = {
    CaseId.A: ((frozenset({"trivial"}),) * 3, None),
    CaseId.B: ((frozenset({"trivial"}), _ORDER_LIKE, _ORDER_LIKE), None),
    CaseId.C: ((_ORDER_LIKE,) * 3, None),
    CaseId.D: ((_ORDER_LIKE,) * 3, 2),
    CaseId.E: (
        (frozenset({"half"}), frozenset({"half"}), frozenset({"parabolic"})),
        None,
    ),
    CaseId.F: (
        (frozenset({"trivial"}), frozenset({"parabolic"}), frozenset({"parabolic"})),
        None,
    ),
    CaseId.G: (
        (frozenset({"half"}), frozenset({"parabolic"}), frozenset({"parabolic"})),
        0,
    ),
    CaseId.H: ((_ORDER_LIKE, frozenset({"parabolic"}), frozenset({"half"})), 2),
}


@dataclass(frozen=True)
class CaseSpec:
    case: CaseId
    constraints: Tuple[TraceConstraint, ...]
    name: str = ""
    description: str = ""
    symmetry: Tuple[Tuple[str, ...], ...] = ()
    explicit_relators: Tuple[Word, ...] = ()
    defaults: Tuple[Tuple[str, Order], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "case", CaseId(self.case))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(self.constraints) != 3:
            raise CaseSpecError(
                f"a case needs exactly 3 constraints, got {len(self.constraints)}"
            )
        if self.case is not CaseId.CUSTOM:
            self._check_pattern()

    def _check_pattern(self):
        allowed, odd_position = _CASE_PATTERNS[self.case]
        for index, (constraint, classes) in enumerate(zip(self.constraints, allowed)):
            if constraint.value_class not in classes:
                raise CaseSpecError(
                    f"case {self.case.value}: constraint {index + 1} "
                    f"({constraint.value_class}) must be one of {sorted(classes)}"
                )
            expected_parity = 1 if index == odd_position else 0
            if constraint.word.parity != expected_parity:
                kind = "odd" if expected_parity else "even"
                raise CaseSpecError(
                    f"case {self.case.value}: word {index + 1} "
                    f"({constraint.word}) must have {kind} length"
                )

    @property
    def parameters(self) -> Tuple[str, ...]:
        names = [c.parameter for c in self.constraints if c.parameter]
        return tuple(dict.fromkeys(names))

    @property
    def label(self) -> str:
        return self.name or f"case {self.case.value}"

    def bind(self, values: Mapping[str, Order]) -> "CaseSpec":
        return replace(
            self, constraints=tuple(c.bind(values) for c in self.constraints)
        )

    def with_defaults(self) -> "CaseSpec":
        return self.bind(dict(self.defaults))

    def orders(self) -> Tuple[Optional[Order], ...]:
        return tuple(c.effective_order for c in self.constraints)

    def relators(self) -> Tuple[Word, ...]:
        """
        Relators in PSL(2, C): the squared generators, each Trivial word, and
        each finite-order word raised to its order. Constraints marked
        relator=False contribute their trace equation only.
        """
        if self.explicit_relators:
            return self.explicit_relators
        if self.parameters:
            raise CaseSpecError(
                f"unbound order parameters {list(self.parameters)}; bind them first"
            )
        relators = [Word.positive(g * 2) for g in "abc"]
        for constraint in self.constraints:
            if not constraint.relator:
                continue
            if constraint.kind is RhsKind.TRIVIAL:
                relators.append(constraint.word)
                continue
            order = constraint.effective_order
            if order != INFINITY:
                relators.append(constraint.word.power(int(order)))
        return tuple(relators)

    def compactness(self) -> str:
        """compact / non_compact / undetermined, from the order side-conditions"""
        if self.case in (CaseId.A, CaseId.B):
            return "compact"
        if self.case in (CaseId.E, CaseId.F, CaseId.G, CaseId.H):
            return "non_compact"
        if self.case is CaseId.CUSTOM or self.parameters:
            return "undetermined"

        inverse = [_inverse_order(o) for o in self.orders()]
        if self.case is CaseId.C:
            total = sum(inverse)
            if total < 1:
                return "compact"
            return "non_compact" if total == 1 else "undetermined"

        # case D: t1 on the first word, t3 on the second, t2 on the odd word
        t1, t3, t2 = inverse
        left, right = t1 + t2, t2 + t3
        half = Fraction(1, 2)
        if left < half and right < half:
            return "compact"
        if left == half or right == half:
            return "non_compact"
        return "undetermined"

    def to_json(self) -> Dict:
        data = {
            "name": self.name,
            "case": self.case.value,
            "constraints": [c.to_json() for c in self.constraints],
        }
        if self.description:
            data["description"] = self.description
        if self.defaults:
            data["parameters"] = dict(self.defaults)
        if self.symmetry:
            data["symmetry"] = [list(block) for block in self.symmetry]
        if self.explicit_relators:
            data["relators"] = [str(w) for w in self.explicit_relators]
        return data


def _inverse_order(order) -> Fraction:
    return Fraction(0) if order == INFINITY else Fraction(1, int(order))


_RHS_ALIASES = {"halfturn": "half_turn", "half-turn": "half_turn", "half": "half_turn"}


def _constraint_from_json(item: Mapping) -> TraceConstraint:
    # "rhs" is either a kind name with a sibling "t", or {"kind": ..., "t": ...}
    rhs = item["rhs"]
    if isinstance(rhs, Mapping):
        kind, order = rhs["kind"], rhs.get("t")
    else:
        kind, order = rhs, item.get("t")
    try:
        kind = RhsKind(_RHS_ALIASES.get(str(kind).lower(), str(kind).lower()))
    except ValueError as exc:
        raise CaseSpecError(f"unknown rhs kind {kind!r}") from exc
    return TraceConstraint(
        word=parse_word(item["word"]),
        kind=kind,
        order=order,
        relator=bool(item.get("relator", True)),
    )


def _case_id(value) -> CaseId:
    try:
        return CaseId(value)
    except ValueError as exc:
        raise CaseSpecError(f"unknown case {value!r}") from exc


def case_spec_from_json(data: Mapping) -> CaseSpec:
    try:
        constraints = [_constraint_from_json(item) for item in data["constraints"]]
        return CaseSpec(
            case=_case_id(data.get("case", "Custom")),
            constraints=tuple(constraints),
            name=data.get("name", ""),
            description=data.get("description", ""),
            symmetry=tuple(tuple(block) for block in data.get("symmetry", ())),
            explicit_relators=tuple(parse_word(w) for w in data.get("relators", ())),
            defaults=tuple(data.get("parameters", {}).items()),
        )
    except KeyError as exc:
        raise CaseSpecFormatError(f"case spec is missing field {exc}") from exc
    except (TypeError, AttributeError) as exc:
        raise CaseSpecFormatError(f"case spec has a malformed field: {exc}") from exc
    except (CaseSpecError, InvalidOrderError) as exc:
        if isinstance(exc, CaseSpecFormatError):
            raise
        raise CaseSpecFormatError(str(exc)) from exc


def load_case_spec(path: Union[str, Path]) -> CaseSpec:
    with open(path) as f:
        return case_spec_from_json(json.load(f))


# ---------------------------------------------------------------------------
# Equations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Equation:
    """lhs(x, y, z) = rhs, lhs with integer coefficients, rhs an exact number"""

    lhs: Poly
    rhs: sp.Expr
    provenance: Provenance
    label: str = ""

    @property
    def expr(self) -> sp.Expr:
        return sp.expand(self.lhs.as_expr() - self.rhs)

    @property
    def is_parametric(self) -> bool:
        return bool(sp.sympify(self.rhs).free_symbols)

    def numeric_rhs(self) -> complex:
        if self.is_parametric:
            raise InvalidOrderError(f"rhs {self.rhs} still has free parameters")
        return complex(sp.N(self.rhs, 30))

    def __str__(self) -> str:
        return f"{self.lhs.as_expr()} = {self.rhs}"

    def to_json(self) -> Dict:
        return {
            "label": self.label,
            "lhs": str(self.lhs.as_expr()),
            "rhs": str(self.rhs),
            "rhs_value": [self.numeric_rhs().real, self.numeric_rhs().imag]
            if not self.is_parametric
            else None,
            "provenance": self.provenance.value,
        }


@dataclass(frozen=True)
class PolySystem:
    equations: Tuple[Equation, ...]
    variables: Tuple[sp.Symbol, ...] = GENS
    substitution: Tuple[Tuple[str, str], ...] = (("x", "x"), ("y", "y"), ("z", "z"))
    warnings: Tuple[str, ...] = field(default=())

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return tuple(str(v) for v in self.variables)

    @property
    def parameters(self) -> Tuple[str, ...]:
        names = set()
        for equation in self.equations:
            names |= {str(s) for s in sp.sympify(equation.rhs).free_symbols}
        return tuple(sorted(names))

    def expand_point(self, point: Sequence[complex]) -> Tuple[complex, complex, complex]:
        """Map a point in the system's variables back to (x, y, z)"""
        values = dict(zip(self.variable_names, point))
        return tuple(complex(values[rep]) for _, rep in self.substitution)

    def bind(self, values: Mapping[str, Order]) -> "PolySystem":
        subs = {
            sp.Symbol(name, positive=True): _check_order(value)
            for name, value in values.items()
        }
        subs = {k: (sp.oo if v == INFINITY else v) for k, v in subs.items()}
        equations = tuple(
            replace(eq, rhs=sp.sympify(eq.rhs).subs(subs))
            if eq.is_parametric
            else eq
            for eq in self.equations
        )
        return replace(self, equations=equations)

    def to_json(self) -> Dict:
        return {
            "variables": list(self.variable_names),
            "equations": [eq.to_json() for eq in self.equations],
            "warnings": list(self.warnings),
        }


def _poly_in(expr, variables: Sequence[sp.Symbol]) -> Poly:
    return Poly(expr, *variables, domain=sp.ZZ)


def assemble_system(spec: CaseSpec) -> PolySystem:
    """
    One equation per constraint. Even traces give P = r directly. An odd trace
    wR = r is squared to R^2 F = r^2, or reduced to R = 0 when r = 0.
    """
    equations: List[Equation] = []
    warnings: List[str] = []
    for index, constraint in enumerate(spec.constraints):
        label = f"{spec.label} eq{index + 1}: tr({constraint.word})"
        trace = trace_of(constraint.word)
        rhs = constraint.rhs

        if trace.is_zero:
            raise CaseSpecError(f"trace of {constraint.word} vanishes identically")
        if not trace.odd.is_zero and not trace.even.is_zero:
            raise MixedParityError(
                f"trace of {constraint.word} has both even and odd parts"
            )

        if trace.is_even:
            equations.append(Equation(trace.even, rhs, Provenance.DIRECT, label))
        elif rhs == 0:
            warnings.append(
                f"{label}: dropped the w = 0 branch (tr(ABC) = 0 gives "
                "degenerate configurations)"
            )
            equations.append(
                Equation(trace.odd, sp.Integer(0), Provenance.ODD_FACTORED, label)
            )
        else:
            equations.append(
                Equation(
                    trace.odd**2 * FRICKE,
                    sp.expand(rhs**2),
                    Provenance.ODD_SQUARED,
                    label,
                )
            )
    return PolySystem(tuple(equations), warnings=tuple(warnings))


def apply_symmetry(
    system: PolySystem, identification: Sequence[Sequence[str]]
) -> PolySystem:
    """
    Identify variables (e.g. [["x", "y", "z"]] for x = y = z). Each block is
    replaced by its first variable; duplicate equations are removed.
    """
    names = system.variable_names
    mapping = {name: name for name in names}
    for block in identification:
        block = [str(v) for v in block]
        unknown = set(block) - set(names)
        if unknown:
            raise CaseSpecError(f"cannot identify unknown variables {sorted(unknown)}")
        for name in block:
            mapping[name] = block[0]

    variables = tuple(sp.Symbol(n) for n in names if mapping[n] == n)
    subs = {sp.Symbol(n): sp.Symbol(rep) for n, rep in mapping.items() if n != rep}

    equations: List[Equation] = []
    seen: List[sp.Expr] = []
    warnings = list(system.warnings)
    for equation in system.equations:
        lhs = _poly_in(equation.lhs.as_expr().subs(subs), variables)
        reduced = replace(equation, lhs=lhs)
        expr = reduced.expr
        if expr == 0:
            warnings.append(f"{equation.label}: identically satisfied after symmetry")
            continue
        if any(_same_up_to_sign(expr, other) for other in seen):
            continue
        seen.append(expr)
        equations.append(reduced)

    substitution = tuple((orig, mapping[rep]) for orig, rep in system.substitution)
    return PolySystem(tuple(equations), variables, substitution, tuple(warnings))


def system_for(spec: CaseSpec) -> PolySystem:
    """Assemble and apply the spec's declared symmetry, if any"""
    system = assemble_system(spec)
    if spec.symmetry:
        system = apply_symmetry(system, spec.symmetry)
    return system


def _same_up_to_sign(left: sp.Expr, right: sp.Expr) -> bool:
    return sp.expand(left - right) == 0 or sp.expand(left + right) == 0
