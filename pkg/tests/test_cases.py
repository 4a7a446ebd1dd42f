import json

import pytest
import sympy as sp

from src.systems.cases import (
    INFINITY,
    CaseId,
    CaseSpec,
    CaseSpecError,
    CaseSpecFormatError,
    InvalidOrderError,
    Provenance,
    RhsKind,
    TraceConstraint,
    apply_symmetry,
    assemble_system,
    case_spec_from_json,
    rhs_value,
    system_for,
)
from src.traces.ring import X, Y, Z
from src.traces.words import parse_word

N = sp.Symbol("n", positive=True)
COS = -2 * sp.cos(sp.pi / N)


def same_up_to_sign(left, right) -> bool:
    return sp.expand(left - right) == 0 or sp.expand(left + right) == 0


def exprs(system):
    return [eq.expr for eq in system.equations]


def test_rhs_values():
    assert rhs_value(RhsKind.TRIVIAL) == 2
    assert rhs_value(RhsKind.PARABOLIC) == -2
    assert rhs_value(RhsKind.HALF_TURN) == 0
    assert rhs_value(RhsKind.ORDER, 2) == 0
    assert rhs_value(RhsKind.ORDER, 3) == -1
    assert rhs_value(RhsKind.ORDER, INFINITY) == -2
    assert rhs_value(RhsKind.ORDER, "n") == COS


@pytest.mark.parametrize("order", [1, 0, -3, True, "2x", 2.5])
def test_invalid_orders(order):
    with pytest.raises(InvalidOrderError):
        TraceConstraint(parse_word("ab"), RhsKind.ORDER, order)


def test_order_spellings():
    for spelling in ("inf", "oo", "∞", float("inf")):
        constraint = TraceConstraint(parse_word("ab"), RhsKind.ORDER, spelling)
        assert constraint.order == INFINITY
    assert TraceConstraint(parse_word("ab"), RhsKind.ORDER, "7").order == 7
    assert TraceConstraint(parse_word("ab"), RhsKind.ORDER, 4.0).order == 4


def test_printed_system_b(case_spec):
    system = assemble_system(case_spec("6B"))
    expected = [
        X**2 * Y**2 + X * Y * Z - X**2 - Y**2 + 2 - 2,
        X**2 * Z + X * Y - Z - COS,
        Y**2 * Z + X * Y - Z - COS,
    ]
    for got, want in zip(exprs(system), expected):
        assert same_up_to_sign(got, want)
    assert all(eq.provenance is Provenance.DIRECT for eq in system.equations)


def test_printed_system_d_on_orthogonal_axes(case_spec):
    spec = case_spec("6D")
    system = assemble_system(spec)
    first, second, third = exprs(system)
    assert same_up_to_sign(first, X)
    assert same_up_to_sign(
        second.subs(X, 0), 4 * Z**2 - Y**2 * Z**2 - Z**4 + Y**2 - 2
    )
    assert same_up_to_sign(
        third.subs(X, 0), 4 * Y**2 - Y**2 * Z**2 - Y**4 - COS**2
    )
    assert system.equations[2].provenance is Provenance.ODD_SQUARED


def test_printed_system_e(case_spec):
    system = assemble_system(case_spec("6E"))
    expected = [
        X * Y + Z,
        X * Y * Z + X**2 + Y**2 - 2,
        -(X**2) * Z - X * Y + Z + 2,
    ]
    for got, want in zip(exprs(system), expected):
        assert same_up_to_sign(got, want)


def test_printed_system_g(case_spec):
    system = assemble_system(case_spec("6G"))
    expected = [
        X * Y * Z + 1,
        X**2 * Z + X * Y - Z + 2,
        X * Z**2 + Y * Z - X + 2,
    ]
    for got, want in zip(exprs(system), expected):
        assert same_up_to_sign(got, want)
    assert system.equations[0].provenance is Provenance.ODD_FACTORED
    assert system.warnings


def test_diagonal_symmetry_reduces_relator_system(case_spec):
    system = system_for(case_spec("6A"))
    assert system.variable_names == ("x",)
    assert len(system.equations) == 1
    reduced = system.equations[0].expr
    assert sp.expand(reduced + (X**3 - X + 1) ** 2 * (X + 2)) == 0
    assert system.expand_point([0.5 + 0.25j]) == (0.5 + 0.25j,) * 3


def test_symmetry_rejects_unknown_variable(case_spec):
    system = assemble_system(case_spec("6E"))
    with pytest.raises(CaseSpecError):
        apply_symmetry(system, [["x", "q"]])


def test_bind_substitutes_order(case_spec):
    spec = case_spec("6B")
    assert spec.parameters == ("n",)
    system = assemble_system(spec.bind({"n": 3}))
    assert system.equations[1].numeric_rhs() == pytest.approx(-1)
    assert spec.with_defaults().orders() == (None, 3, 3)


def test_poly_system_bind(case_spec):
    system = assemble_system(case_spec("6B"))
    assert system.parameters == ("n",)
    bound = system.bind({"n": 4})
    assert not bound.parameters
    assert bound.equations[2].numeric_rhs() == pytest.approx(-(2**0.5))
    with pytest.raises(InvalidOrderError):
        system.equations[1].numeric_rhs()


def test_relators_from_constraints(case_spec):
    relators = [str(w) for w in case_spec("6E").relators()]
    assert relators == [
        "aa",
        "bb",
        "cc",
        "aca'b'aca'b'",
        "cbab'c'a'cbab'c'a'",
    ]
    with pytest.raises(CaseSpecError):
        case_spec("6B").relators()
    bound = [str(w) for w in case_spec("6B").with_defaults().relators()]
    assert bound[3:] == ["ba'b'ab'c'" * 3, "cbc'aca'" * 3]
    assert "ac'a'ca'bab'" not in bound


def test_pattern_is_checked():
    with pytest.raises(CaseSpecError):
        CaseSpec(
            CaseId.E,
            (
                TraceConstraint(parse_word("aca'b'"), RhsKind.PARABOLIC),
                TraceConstraint(parse_word("cbab'c'a'"), RhsKind.HALF_TURN),
                TraceConstraint(parse_word("baba'b'c'"), RhsKind.PARABOLIC),
            ),
        )


def test_odd_word_position_is_checked():
    with pytest.raises(CaseSpecError):
        CaseSpec(
            CaseId.G,
            (
                TraceConstraint(parse_word("ab"), RhsKind.HALF_TURN),
                TraceConstraint(parse_word("ab'c'ba'b'"), RhsKind.PARABOLIC),
                TraceConstraint(parse_word("bab'cbc'"), RhsKind.PARABOLIC),
            ),
        )


def test_constraint_count_is_checked():
    with pytest.raises(CaseSpecError):
        CaseSpec(CaseId.CUSTOM, (TraceConstraint(parse_word("ab"), RhsKind.TRIVIAL),))


def _orders(case, words, orders):
    return CaseSpec(
        case,
        tuple(
            TraceConstraint(parse_word(w), RhsKind.ORDER, t)
            for w, t in zip(words, orders)
        ),
    )


@pytest.mark.parametrize(
    "orders, expected",
    [((3, 3, 4), "compact"), ((3, 3, 3), "non_compact"), ((2, 2, 5), "undetermined")],
)
def test_compactness_case_c(orders, expected):
    words = ("acb'aba'", "b'ab'a'bc'", "cb'aba'bab'a'bc'a'")
    assert _orders(CaseId.C, words, orders).compactness() == expected


@pytest.mark.parametrize(
    "orders, expected",
    [((7, 7, 3), "compact"), ((6, 8, 3), "non_compact"), ((2, 2, 3), "undetermined")],
)
def test_compactness_case_d(orders, expected):
    words = ("ab'c'ab'cba'", "ab'c'ba'cbcb'c'", "b'c'ab'cba'")
    assert _orders(CaseId.D, words, orders).compactness() == expected


def test_compactness_fixed_cases(case_spec):
    assert case_spec("6A").compactness() == "compact"
    assert case_spec("6E").compactness() == "non_compact"
    assert case_spec("6C").compactness() == "undetermined"


def test_spec_json_formats(case_spec, fixtures_dir):
    nested = case_spec_from_json(
        {
            "case": "B",
            "constraints": [
                {"word": "ac'a'ca'bab'", "rhs": {"kind": "trivial"}, "relator": False},
                {"word": "ba'b'ab'c'", "rhs": {"kind": "order", "t": 3}},
                {"word": "cbc'aca'", "rhs": {"kind": "Order", "t": "3"}},
            ],
        }
    )
    assert nested.orders() == (None, 3, 3)
    with open(fixtures_dir / "cases" / "6B.json") as f:
        flat = case_spec_from_json(json.load(f))
    assert flat.with_defaults().constraints == nested.constraints
    assert case_spec_from_json(flat.to_json()) == flat


@pytest.mark.parametrize(
    "data",
    [
        {"case": "B"},
        {"case": "Q", "constraints": []},
        {"constraints": [{"word": "ab", "rhs": "sometimes"}] * 3},
        {"constraints": [{"word": "ab", "rhs": "order", "t": 1}] * 3},
        {"constraints": "ab"},
    ],
)
def test_bad_spec_json(data):
    with pytest.raises(CaseSpecFormatError):
        case_spec_from_json(data)


def test_equation_json(case_spec):
    data = assemble_system(case_spec("6E")).to_json()
    assert data["variables"] == ["x", "y", "z"]
    first = data["equations"][0]
    assert first["provenance"] == "direct"
    assert first["rhs_value"] == [0.0, 0.0]
