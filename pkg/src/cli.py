# src/cli.py

"""
Command-line entry point: python -m src.cli <subcommand> ...

Every subcommand writes one JSON document {"manifest": ..., "result": ...}
to stdout; progress goes to stderr. Exit codes: 0 ok, 1 usage, 2 computation.
"""

import argparse
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from src import __version__
from src.geometry.representation import (
    VERIFY_TOL,
    DegenerateAxesError,
    NotALineMatrixError,
    Parameters,
    VanishingAbcTraceWarning,
    build_representation,
    fixed_points,
    verify_relators,
)
from src.geometry.two_generator import (
    commutator_trace,
    index_note,
    to_gm,
    two_generator_pair,
)
from src.groups.presentation import (
    PresentationError,
    abelianize,
    load_presentation,
    rank_lower_bound_check,
)
from src.pipeline.orchestrator import NO_CANDIDATES, PipelineStageError, run_pipeline
from src.systems.algebraic import IdConfig, identify, identify_squared
from src.systems.cases import (
    CaseSpecError,
    CaseSpecFormatError,
    InvalidOrderError,
    MixedParityError,
    load_case_spec,
    system_for,
)
from src.systems.solver import (
    PositiveDimensionalWarning,
    SolverConfig,
    SolverError,
    solve,
    solve_parametric,
)
from src.traces.engine import InconsistentPointError, trace_of
from src.traces.ring import trace_to_json
from src.traces.words import WordSyntaxError, parse_word
from src.utils.config import get_settings
from src.utils.db import ResultsDB
from src.utils.reporting import Reporter
from src.utils.serialization import complex_to_json, dumps

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2

COMPUTATION_ERRORS = (
    DegenerateAxesError,
    NotALineMatrixError,
    MixedParityError,
    InvalidOrderError,
    CaseSpecError,
    SolverError,
    InconsistentPointError,
    PipelineStageError,
)
USAGE_ERRORS = (
    CaseSpecFormatError,
    WordSyntaxError,
    PresentationError,
    FileNotFoundError,
    json.JSONDecodeError,
)


class UsageError(Exception):
    """Bad command-line input detected after argument parsing"""


class CliParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this contract reserves 2 for math"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunManifest:
    subcommand: str
    inputs: Dict[str, str] = field(default_factory=dict)
    overrides: Dict[str, object] = field(default_factory=dict)
    seed: Optional[int] = None
    tool_version: str = __version__
    timestamp: Optional[str] = None

    def __post_init__(self):
        if self.timestamp is None:
            self.timestamp = run_timestamp()


def run_timestamp() -> Optional[str]:
    """
    UTC ISO-8601 from SOURCE_DATE_EPOCH, or None. The wall clock only goes
    to the run history.
    """
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if not epoch:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


def parse_complex(text: str) -> complex:
    """'re,im' or a literal such as '0.5+0.866i'"""
    text = text.strip()
    try:
        if "," in text:
            re_part, im_part = text.split(",")
            return complex(float(re_part), float(im_part))
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def parse_orders(text: str) -> List:
    values = []
    for item in text.split(","):
        item = item.strip()
        values.append(int(item) if item.isdigit() else item)
    return values


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, settings, suppress: bool):
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    parser.add_argument("--seed", type=int, default=default(settings.seed))
    parser.add_argument("--tol", type=float, default=default(settings.residual_tol))
    parser.add_argument(
        "--json-indent", type=int, default=default(settings.json_indent)
    )
    parser.add_argument(
        "--quiet", action="store_true", default=default(settings.quiet)
    )


def _add_params(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("parameters")
    group.add_argument("--params", help="JSON file with 'rho' or 'mu' lists")
    for index in range(3):
        group.add_argument(f"--rho{index}", type=parse_complex)
        group.add_argument(f"--mu{index}", type=parse_complex)


def build_parser() -> CliParser:
    settings = get_settings()
    parser = CliParser(
        prog="triangle",
        description="Generalized triangle groups: traces, equations, representations",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    _add_common(parser, settings, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        child = sub.add_parser(name, help=help_text)
        _add_common(child, settings, suppress=True)
        return child

    p = add("trace", "trace polynomial of a word")
    p.add_argument("word")

    p = add("repr", "A, B, C matrices for a parameter triple")
    _add_params(p)

    p = add("solve", "solve the trace equations of a case spec")
    p.add_argument("spec")
    p.add_argument("--starts", type=int, default=settings.starts)
    p.add_argument("--radius", type=float, default=settings.sample_radius)
    p.add_argument("--orders", type=parse_orders, help="comma list, e.g. 3,4,5,inf")
    p.add_argument("--table-out", help="write the sweep table (.csv or .parquet)")

    p = add("verify", "check relators at a parameter triple")
    _add_params(p)
    p.add_argument("--relators", nargs="*", default=[])
    p.add_argument("--case", help="take the relators of this case spec")

    p = add("convert", "complex distances and two-generator parameters")
    _add_params(p)

    p = add("identify", "integer minimal polynomial of a complex number")
    p.add_argument("--re", type=float, required=True)
    p.add_argument("--im", type=float, default=0.0)
    p.add_argument("--max-degree", type=int, default=IdConfig.max_degree)
    p.add_argument("--max-height", type=int, default=IdConfig.max_height)
    p.add_argument(
        "--max-evaluations", type=int, default=IdConfig.max_evaluations
    )
    p.add_argument("--squared", action="store_true", help="identify the square")

    p = add("abelianize", "abelianization of a finite presentation")
    p.add_argument("presentation")
    p.add_argument("--claimed-rank", type=int)

    p = add("pipeline", "assemble, solve, filter, identify and convert a case")
    p.add_argument("spec")
    p.add_argument("--starts", type=int, default=settings.starts)
    p.add_argument("--radius", type=float, default=settings.sample_radius)
    p.add_argument("--order", help="value for the case's order parameter")
    p.add_argument("--id-max-degree", type=int, default=6)
    p.add_argument("--id-max-height", type=int, default=IdConfig.max_height)
    p.add_argument(
        "--db", nargs="?", const=settings.db_path, help="record the run in DuckDB"
    )
    return parser


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _params_from_args(args) -> Parameters:
    if args.params:
        with open(args.params) as f:
            return Parameters.from_json(json.load(f))
    rho = [getattr(args, f"rho{i}") for i in range(3)]
    mu = [getattr(args, f"mu{i}") for i in range(3)]
    if all(v is not None for v in rho):
        return Parameters(*rho)
    if all(v is not None for v in mu):
        return Parameters.from_mu(*mu)
    raise UsageError("give --params FILE, all of --rho0..2, or all of --mu0..2")


def _fixture_path(text: str, kind: str) -> Path:
    """A file path, or the bare name of a bundled fixture (e.g. '6A')"""
    path = Path(text)
    if path.exists():
        return path
    bundled = Path(get_settings().fixtures_dir) / kind / f"{text}.json"
    return bundled if bundled.exists() else path


def _matrix_json(matrix: np.ndarray) -> list:
    return [[complex_to_json(v) for v in row] for row in matrix]


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        starts=args.starts,
        residual_tol=args.tol,
        sample_radius=args.radius,
        rng_seed=args.seed,
    )


def cmd_trace(args, reporter: Reporter):
    return trace_to_json(trace_of(parse_word(args.word)))


def cmd_repr(args, reporter: Reporter):
    params = _params_from_args(args)
    rep = build_representation(params)
    reporter.ok(f"beta = {rep.beta:.6g}")
    return {
        "params": params.to_json(),
        "A": _matrix_json(rep.A),
        "B": _matrix_json(rep.B),
        "C": _matrix_json(rep.C),
        "beta": complex_to_json(rep.beta),
        "c11": complex_to_json(rep.c11),
        "c12": complex_to_json(rep.c12),
        "c21": complex_to_json(rep.c21),
        "abc_trace": complex_to_json(rep.abc_trace),
        "fix_A": [complex_to_json(z) for z in fixed_points(rep.A)],
        "fix_B": [complex_to_json(z) for z in fixed_points(rep.B)],
    }


def cmd_solve(args, reporter: Reporter):
    spec = load_case_spec(_fixture_path(args.spec, "cases"))
    config = _solver_config(args)
    if args.orders:
        reporter.banner(f"Parametric sweep: {spec.label}")
        table = solve_parametric(spec, args.orders, config, progress=not reporter.quiet)
        if args.table_out:
            out = Path(args.table_out)
            out.parent.mkdir(parents=True, exist_ok=True)
            if out.suffix == ".parquet":
                table.to_parquet(out, index=False)
            else:
                table.to_csv(out, index=False)
            reporter.ok(f"Table written to {out}")
        return table.to_dict(orient="records")

    spec = spec.with_defaults()
    solutions = solve(system_for(spec), config)
    reporter.ok(f"{len(solutions)} distinct solutions")
    return [s.to_json() for s in solutions]


def cmd_verify(args, reporter: Reporter):
    params = _params_from_args(args)
    relators = [parse_word(text) for text in args.relators]
    if args.case:
        spec = load_case_spec(_fixture_path(args.case, "cases")).with_defaults()
        relators += list(spec.relators())
    if not relators:
        raise UsageError("no relators given (use --relators or --case)")
    rep = build_representation(params)
    report = verify_relators(rep, relators, tol=max(args.tol, VERIFY_TOL))
    (reporter.ok if report.passed else reporter.warn)(
        f"max relator residual {report.max_residual:.3e}"
    )
    return report.to_json()


def cmd_convert(args, reporter: Reporter):
    params = _params_from_args(args)
    rep = build_representation(params)
    f, g = two_generator_pair(rep)
    note, reason = index_note(rep)
    return {
        "rho": [complex_to_json(r) for r in params.rho],
        "mu": [complex_to_json(m) for m in params.mu],
        "gm": to_gm(params).to_json(),
        "two_generator": {
            "tr_f": complex_to_json(np.trace(f)),
            "tr_g": complex_to_json(np.trace(g)),
            "tr_fg": complex_to_json(np.trace(f @ g)),
            "commutator_trace": complex_to_json(commutator_trace(f, g)),
            "index": {"note": note.value, "reason": reason},
        },
    }


def cmd_identify(args, reporter: Reporter):
    config = IdConfig(
        max_degree=args.max_degree,
        max_height=args.max_height,
        max_evaluations=args.max_evaluations,
        progress=not reporter.quiet,
    )
    value = complex(args.re, args.im)
    found = (identify_squared if args.squared else identify)(value, config)
    if found is None:
        reporter.warn("no polynomial within bounds or evaluation budget")
        return {"found": False, "coefficients": None}
    reporter.ok(f"{found}")
    return {"found": True, **found.to_json()}


def cmd_abelianize(args, reporter: Reporter):
    presentation = load_presentation(_fixture_path(args.presentation, "presentations"))
    invariants = abelianize(presentation)
    reporter.ok(f"H1 = {invariants}")
    result = {"presentation": presentation.to_json(), **invariants.to_json()}
    if args.claimed_rank is not None:
        result["claimed_rank"] = args.claimed_rank
        result["rank_check"] = rank_lower_bound_check(presentation, args.claimed_rank)
    return result


def cmd_pipeline(args, reporter: Reporter):
    spec = load_case_spec(_fixture_path(args.spec, "cases"))
    if args.order is not None:
        value = int(args.order) if args.order.isdigit() else args.order
        spec = spec.bind({name: value for name in spec.parameters})
    report = run_pipeline(
        spec,
        _solver_config(args),
        IdConfig(max_degree=args.id_max_degree, max_height=args.id_max_height),
        reporter,
    )
    if not report["candidates"]:
        reporter.line(NO_CANDIDATES)
    return report


COMMANDS = {
    "trace": cmd_trace,
    "repr": cmd_repr,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "convert": cmd_convert,
    "identify": cmd_identify,
    "abelianize": cmd_abelianize,
    "pipeline": cmd_pipeline,
}

_INPUT_KEYS = ("spec", "presentation", "params", "case", "word")
_OVERRIDE_KEYS = (
    "starts",
    "radius",
    "orders",
    "order",
    "tol",
    "max_degree",
    "max_height",
    "max_evaluations",
)


def _manifest(args) -> RunManifest:
    inputs = {k: str(getattr(args, k)) for k in _INPUT_KEYS if getattr(args, k, None)}
    overrides = {}
    for key in _OVERRIDE_KEYS:
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    return RunManifest(args.command, inputs, overrides, seed=args.seed)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    reporter = Reporter(quiet=args.quiet)
    manifest = _manifest(args)

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PositiveDimensionalWarning)
            warnings.simplefilter("always", VanishingAbcTraceWarning)
            result = COMMANDS[args.command](args, reporter)
    except USAGE_ERRORS + (UsageError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except COMPUTATION_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION

    envelope = {"manifest": asdict(manifest), "result": result}
    messages = [str(w.message) for w in caught]
    for message in messages:
        reporter.warn(message)
    if messages:
        envelope["warnings"] = messages

    if args.command == "pipeline" and args.db:
        db = ResultsDB(args.db, reporter)
        db.record_run(envelope["manifest"], result)
        db.print_summary()
        db.close()

    print(dumps(envelope, indent=args.json_indent))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
