# src/pipeline/orchestrator.py

"""
End-to-end run for one case: assemble -> solve -> filter -> identify -> convert
Each stage is reported in banner style; failures are wrapped with the stage name.
"""

import warnings
from typing import Dict, List, Optional

from src.geometry.representation import (
    VanishingAbcTraceWarning,
    build_representation,
    verify_relators,
)
from src.geometry.two_generator import index_note, to_gm
from src.systems.algebraic import IdConfig, identify, identify_squared
from src.systems.cases import CaseSpec, system_for
from src.systems.solver import (
    Flag,
    PositiveDimensionalWarning,
    SolverConfig,
    filter_candidates,
    solve,
)
from src.utils.reporting import Reporter

STAGES = ("assemble", "solve", "filter", "identify", "convert")

NO_CANDIDATES = "no complex candidates"
ABC_TRACE_TOL = 1e-8


class PipelineStageError(RuntimeError):
    """A pipeline stage failed; carries the stage label"""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


def _identify_point(point, id_config: IdConfig) -> Dict:
    result = {}
    for name, value in zip(("x", "y", "z"), point):
        found = identify(value, id_config)
        squared = identify_squared(value, id_config)
        result[name] = found.to_json() if found else None
        result[f"{name}_squared"] = squared.to_json() if squared else None
    return result


def run_pipeline(
    spec: CaseSpec,
    solver_config: Optional[SolverConfig] = None,
    id_config: Optional[IdConfig] = None,
    reporter: Optional[Reporter] = None,
) -> Dict:
    """Run every stage on a fully bound case spec and return a JSON-ready report"""
    solver_config = solver_config or SolverConfig()
    id_config = id_config or IdConfig()
    reporter = reporter or Reporter(quiet=True)
    total = len(STAGES)
    stage = STAGES[0]

    reporter.banner(f"Triangle group pipeline: {spec.label}")
    try:
        # 1. Assemble
        reporter.step(1, total, "Assembling trace equations...")
        spec = spec.with_defaults()
        system = system_for(spec)
        relators = spec.relators()
        for equation in system.equations:
            reporter.line(f"  {equation.provenance.value:13s} {equation}")
        for message in system.warnings:
            reporter.warn(message)
        reporter.ok(f"{len(system.equations)} equations in {system.variable_names}")

        # 2. Solve
        stage = STAGES[1]
        reporter.step(2, total, f"Solving from {solver_config.starts} starts...")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PositiveDimensionalWarning)
            solutions = solve(system, solver_config)
        solver_warnings = [str(w.message) for w in caught]
        for message in solver_warnings:
            reporter.warn(message)
        reporter.ok(f"{len(solutions)} distinct solutions")

        # 3. Filter
        stage = STAGES[2]
        reporter.step(3, total, "Filtering complex candidates...")
        candidates = filter_candidates(solutions, relators)
        real = sum(Flag.REAL_TRIPLE in s.flags for s in solutions)
        degenerate = sum(Flag.DEGENERATE in s.flags for s in solutions)
        reporter.line(f"  real triples: {real}, degenerate: {degenerate}")
        if candidates:
            reporter.ok(f"{len(candidates)} candidates after relator check")
        else:
            reporter.warn(NO_CANDIDATES)

        # 4. Identify
        stage = STAGES[3]
        reporter.step(4, total, "Identifying minimal polynomials...")
        identified = [_identify_point(c.point, id_config) for c in candidates]
        for candidate, polys in zip(candidates, identified):
            text = polys["x"]["polynomial"] if polys["x"] else "not found"
            reporter.line(f"  x = {candidate.point[0]:.6f}: {text}")

        # 5. Convert
        stage = STAGES[4]
        reporter.step(5, total, "Building representations...")
        entries: List[Dict] = []
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", VanishingAbcTraceWarning)
            reps = [build_representation(c.params) for c in candidates]
            for candidate, rep in zip(candidates, reps):
                if abs(rep.abc_trace) < ABC_TRACE_TOL:
                    warnings.warn(
                        f"tr(ABC) vanishes at {candidate.point}; its sign is undefined",
                        VanishingAbcTraceWarning,
                    )
        convert_warnings = [str(w.message) for w in caught]
        for message in convert_warnings:
            reporter.warn(message)
        for candidate, polys, rep in zip(candidates, identified, reps):
            note, reason = index_note(rep)
            entry = candidate.to_json()
            entry.update(
                {
                    "mu": [[m.real, m.imag] for m in candidate.params.mu],
                    "relators": verify_relators(rep, relators).to_json(),
                    "min_poly": polys,
                    "gm": to_gm(candidate.params).to_json(),
                    "abc_trace": [rep.abc_trace.real, rep.abc_trace.imag],
                    "two_generator_index": {"note": note.value, "reason": reason},
                }
            )
            entries.append(entry)
        reporter.ok(f"{len(entries)} representations verified")
    except Exception as exc:
        reporter.fail(f"{stage} failed: {exc}")
        raise PipelineStageError(stage, exc) from exc

    report = {
        "name": spec.label,
        "case": spec.case.value,
        "orders": list(spec.orders()),
        "compactness": spec.compactness(),
        "system": system.to_json(),
        "solver": {
            "starts": solver_config.starts,
            "rng_seed": solver_config.rng_seed,
            "residual_tol": solver_config.residual_tol,
        },
        "warnings": list(system.warnings) + solver_warnings + convert_warnings,
        "solutions_found": len(solutions),
        "solutions": [s.to_json() for s in solutions],
        "candidates": entries,
    }
    if not entries:
        report["message"] = NO_CANDIDATES

    reporter.banner(f"✅ {spec.label}: {len(entries)} candidates")
    return report
