# src/systems/solver.py

"""
Deterministic multi-start Newton solver for small complex polynomial systems.

All starts are iterated together as numpy batches. Polynomials and their
exact derivatives come from sympy and are compiled with lambdify.
"""

import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import sympy as sp
from tqdm import tqdm

from src.geometry.representation import (
    DegenerateAxesError,
    Parameters,
    build_representation,
    verify_relators,
)
from src.systems.cases import CaseSpec, PolySystem, system_for
from src.traces.words import Word

REAL_TOL = 1e-8
DEGENERATE_TOL = 1e-8
DIVERGENCE_BOUND = 1e8


class SolverError(ValueError):
    """System cannot be solved as given (e.g. fewer equations than unknowns)"""


class PositiveDimensionalWarning(UserWarning):
    """Most starts converged to distinct points: the solution set is likely a curve"""


class Flag(str, Enum):
    REAL_TRIPLE = "real_triple"
    DEGENERATE = "degenerate"
    COMPLEX_CANDIDATE = "complex_candidate"
    CONJUGATE = "conjugate"
    ORIENTATION = "orientation"


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 2000
    max_iter: int = 100
    residual_tol: float = 1e-10
    dedup_tol: float = 1e-6
    sample_radius: float = 3.0
    rng_seed: int = 0
    max_halvings: int = 20
    singular_det_tol: float = 1e-14
    flat_gradient_tol: float = 1e-3
    refine_iter: int = 12
    positive_dim_fraction: float = 0.25
    # points around a multiple root scatter by about residual ** (1 / multiplicity)
    merge_radius: float = 1e-2
    merge_factor: float = 1e3
    real_snap_radius: float = 1e-2
    real_snap_factor: float = 1e6
    real_polish_iter: int = 8


@dataclass(frozen=True)
class Solution:
    point: Tuple[complex, complex, complex]
    residual: float
    flags: FrozenSet[Flag]
    multiplicity_hint: int = 1
    spread: float = 0.0

    @property
    def params(self) -> Parameters:
        return Parameters(*self.point)

    @property
    def accuracy(self) -> float:
        """Rough error bound on the coordinates, safe for double roots"""
        return max(self.spread, float(np.sqrt(self.residual)))

    def to_json(self) -> Dict:
        return {
            "point": [[v.real, v.imag] for v in self.point],
            "residual": self.residual,
            "flags": sorted(f.value for f in self.flags),
            "multiplicity_hint": self.multiplicity_hint,
        }


def _stack(values, count: int) -> np.ndarray:
    """lambdify returns scalars for constant entries; broadcast them to the batch"""
    return np.stack(
        [np.broadcast_to(np.asarray(v, dtype=complex), (count,)) for v in values],
        axis=-1,
    )


class CompiledSystem:
    """Numeric residuals, Jacobians and (lazily) Hessians of a PolySystem"""

    def __init__(self, system: PolySystem):
        self.system = system
        self.variables = system.variables
        self.k = len(self.variables)
        self.m = len(system.equations)
        if self.m < self.k:
            raise SolverError(
                f"{self.m} equations for {self.k} unknowns: system is underdetermined"
            )
        polys = [sp.Poly(eq.lhs.as_expr(), *self.variables) for eq in system.equations]
        self._polys = polys
        self.rhs = np.array([eq.numeric_rhs() for eq in system.equations])
        self._values = sp.lambdify(self.variables, [p.as_expr() for p in polys], "numpy")
        self._jacobian = sp.lambdify(
            self.variables,
            [p.diff(v).as_expr() for p in polys for v in self.variables],
            "numpy",
        )
        self._hessian = None

    def values(self, Z: np.ndarray) -> np.ndarray:
        """(N, k) points -> (N, m) equation residuals lhs - rhs"""
        raw = self._values(*Z.T)
        return _stack(raw, len(Z)) - self.rhs

    def jacobian(self, Z: np.ndarray) -> np.ndarray:
        raw = self._jacobian(*Z.T)
        return _stack(raw, len(Z)).reshape(len(Z), self.m, self.k)

    def hessian(self, Z: np.ndarray) -> np.ndarray:
        if self._hessian is None:
            self._hessian = sp.lambdify(
                self.variables,
                [
                    p.diff(u).diff(v).as_expr()
                    for p in self._polys
                    for u in self.variables
                    for v in self.variables
                ],
                "numpy",
            )
        raw = self._hessian(*Z.T)
        return _stack(raw, len(Z)).reshape(len(Z), self.m, self.k, self.k)

    def residual(self, Z: np.ndarray) -> np.ndarray:
        return np.abs(self.values(Z)).max(axis=1)


def sample_starts(config: SolverConfig, dimension: int) -> np.ndarray:
    """One independent generator per start, so start i never depends on N"""
    children = np.random.SeedSequence(config.rng_seed).spawn(config.starts)
    starts = np.empty((config.starts, dimension), dtype=complex)
    for index, child in enumerate(children):
        rng = np.random.default_rng(child)
        radius = config.sample_radius * np.sqrt(rng.random(dimension))
        angle = 2 * np.pi * rng.random(dimension)
        starts[index] = radius * np.exp(1j * angle)
    return starts


def _newton(compiled: CompiledSystem, Z: np.ndarray, config: SolverConfig) -> np.ndarray:
    """Damped Newton on the first k equations; returns a converged mask"""
    k = compiled.k
    status = np.zeros(len(Z), dtype=int)  # 0 running, 1 converged, 2 abandoned

    def square_residual(points):
        return np.abs(compiled.values(points)[:, :k]).max(axis=1)

    for _ in range(config.max_iter):
        active = np.flatnonzero(status == 0)
        if not active.size:
            break
        points = Z[active]
        F = compiled.values(points)[:, :k]
        res = np.abs(F).max(axis=1)

        done = res <= config.residual_tol
        status[active[done]] = 1
        lost = ~np.isfinite(res) | (np.abs(points).max(axis=1) > DIVERGENCE_BOUND)
        status[active[lost & ~done]] = 2
        keep = ~done & ~lost
        active, points, F, res = active[keep], points[keep], F[keep], res[keep]
        if not active.size:
            break

        J = compiled.jacobian(points)[:, :k, :]
        det = np.linalg.det(J)
        singular = ~np.isfinite(det) | (np.abs(det) < config.singular_det_tol)
        status[active[singular]] = 2
        ok = ~singular
        active, points, F, res, J = active[ok], points[ok], F[ok], res[ok], J[ok]
        if not active.size:
            continue

        step = np.linalg.solve(J, -F[..., None])[..., 0]
        scale = np.ones(len(active))
        pending = np.ones(len(active), dtype=bool)
        for _ in range(config.max_halvings + 1):
            idx = np.flatnonzero(pending)
            if not idx.size:
                break
            trial = points[idx] + scale[idx, None] * step[idx]
            with np.errstate(all="ignore"):
                trial_res = square_residual(trial)
            better = np.isfinite(trial_res) & (trial_res < res[idx])
            Z[active[idx[better]]] = trial[better]
            pending[idx[better]] = False
            scale[idx[~better]] /= 2
        # no decrease even at the smallest step
        status[active[pending]] = 2

    return status == 1


def _refine(compiled: CompiledSystem, Z: np.ndarray, config: SolverConfig) -> np.ndarray:
    """
    Gauss-Newton polish on all equations. Equations whose gradient vanishes at
    the root (tr = 2 at a relator vanishes to second order) also contribute
    their partial derivatives, which turns a singular root into a regular one.
    """
    if not len(Z):
        return Z
    Z = Z.copy()
    k, m = compiled.k, compiled.m
    flat = np.abs(compiled.jacobian(Z)).max(axis=2) <= config.flat_gradient_tol
    any_flat = bool(flat.any())

    def stacked(points, mask):
        F = compiled.values(points)
        J = compiled.jacobian(points)
        if not any_flat:
            return F, J
        H = compiled.hessian(points)
        G = np.where(mask[:, :, None], J, 0).reshape(len(points), m * k)
        HJ = np.where(mask[:, :, None, None], H, 0).reshape(len(points), m * k, k)
        return np.concatenate([F, G], axis=1), np.concatenate([J, HJ], axis=1)

    R, JR = stacked(Z, flat)
    norm = np.linalg.norm(R, axis=1)
    running = np.ones(len(Z), dtype=bool)
    for _ in range(config.refine_iter):
        idx = np.flatnonzero(running)
        if not idx.size:
            break
        with np.errstate(all="ignore"):
            step = -(np.linalg.pinv(JR[idx]) @ R[idx][..., None])[..., 0]
            trial = Z[idx] + step
            R_new, JR_new = stacked(trial, flat[idx])
            norm_new = np.linalg.norm(R_new, axis=1)
        better = np.isfinite(norm_new) & (norm_new < norm[idx])
        accepted = idx[better]
        Z[accepted] = trial[better]
        R[accepted], JR[accepted], norm[accepted] = (
            R_new[better],
            JR_new[better],
            norm_new[better],
        )
        running[idx[~better]] = False
    return Z


def _real_mask(
    compiled: CompiledSystem,
    points: np.ndarray,
    residuals: np.ndarray,
    config: SolverConfig,
) -> np.ndarray:
    """
    Points that are real up to their own accuracy. A point with small
    imaginary parts counts as real when a real Gauss-Newton polish of its real
    part reaches a residual comparable to the point's own; a genuinely complex
    root leaves a residual of the order of its imaginary part.
    """
    imag = np.abs(points.imag).max(axis=1) if len(points) else np.zeros(0)
    real = imag <= REAL_TOL
    idx = np.flatnonzero(~real & (imag <= config.real_snap_radius))
    if not idx.size:
        return real

    X = points[idx].real.astype(complex)
    with np.errstate(all="ignore"):
        res = compiled.residual(X)
        for _ in range(config.real_polish_iter):
            F = compiled.values(X).real
            J = compiled.jacobian(X).real
            step = -(np.linalg.pinv(J) @ F[..., None])[..., 0]
            trial = X + step
            trial_res = compiled.residual(trial)
            better = np.isfinite(trial_res) & (trial_res < res)
            X[better] = trial[better]
            res[better] = trial_res[better]

    bound = np.maximum(config.real_snap_factor * residuals[idx], config.residual_tol)
    nearby = np.abs(X - points[idx]).max(axis=1) <= config.real_snap_radius
    real[idx] = nearby & (res <= bound)
    return real


def _classify(point: Tuple[complex, ...], real: bool, accuracy: float) -> FrozenSet[Flag]:
    flags = set()
    if real:
        flags.add(Flag.REAL_TRIPLE)
    # only rho_0 enters the matrix construction; rho_1 = 2 is a legitimate candidate
    if abs(point[0] ** 2 - 4) <= max(DEGENERATE_TOL, 4 * accuracy):
        flags.add(Flag.DEGENERATE)
    if not flags:
        flags.add(Flag.COMPLEX_CANDIDATE)
    return frozenset(flags)


def _sort_key(solution: Solution):
    coords = tuple(c for v in solution.point for c in (v.real, v.imag))
    return (solution.residual,) + coords


def solve(system: PolySystem, config: Optional[SolverConfig] = None) -> List[Solution]:
    """
    All isolated solutions reachable from the seeded starts, deduplicated,
    classified and sorted by (residual, coordinates).
    """
    config = config or SolverConfig()
    compiled = CompiledSystem(system)
    Z = sample_starts(config, compiled.k)
    with np.errstate(all="ignore"):
        converged = _newton(compiled, Z, config)
        candidates = _refine(compiled, Z[converged], config)
        residuals = compiled.residual(candidates)
        fallback = compiled.residual(Z[converged])
    # keep the unrefined point if polishing did not stay within tolerance
    use_refined = residuals <= config.residual_tol
    points = np.where(use_refined[:, None], candidates, Z[converged])
    residuals = np.where(use_refined, residuals, fallback)

    clusters = _cluster(compiled, points, residuals, config)

    if len(clusters) > config.positive_dim_fraction * config.starts:
        warnings.warn(
            f"{len(clusters)} distinct points from {config.starts} starts; "
            "the solution set is probably positive-dimensional",
            PositiveDimensionalWarning,
            stacklevel=2,
        )

    if clusters:
        reps = np.array([c[0] for c in clusters])
        real = _real_mask(compiled, reps, np.array([c[1] for c in clusters]), config)
    else:
        real = np.zeros(0, dtype=bool)

    solutions = []
    for (point, residual, count, spread), is_real in zip(clusters, real):
        triple = system.expand_point([complex(v) for v in point])
        accuracy = max(spread, float(np.sqrt(residual)))
        solutions.append(
            Solution(
                triple,
                float(residual),
                _classify(triple, bool(is_real), accuracy),
                count,
                float(spread),
            )
        )
    return sorted(solutions, key=_sort_key)


def _cluster(
    compiled: CompiledSystem,
    points: np.ndarray,
    residuals: np.ndarray,
    config: SolverConfig,
) -> List[List]:
    """
    Group converged points by the root they approximate, best residual first.
    Two points farther apart than dedup_tol still share a root when the
    system stays small at their midpoint, which is what happens around a
    multiple root and never between two distinct simple roots.
    """
    clusters: List[List] = []  # [point, residual, count, spread]
    order = np.argsort(residuals, kind="stable")
    for i in order:
        point, residual = points[i], residuals[i]
        if not residual <= config.residual_tol:
            continue
        match = None
        if clusters:
            reps = np.array([c[0] for c in clusters])
            dist = np.abs(reps - point).max(axis=1)
            near = np.flatnonzero(dist <= config.merge_radius)
            close = near[dist[near] <= config.dedup_tol]
            if close.size:
                match = close[0]
            elif near.size:
                with np.errstate(all="ignore"):
                    mid_res = compiled.residual((reps[near] + point) / 2)
                bound = max(config.merge_factor * residual, config.residual_tol)
                shared = near[mid_res <= bound]
                if shared.size:
                    match = shared[np.argmin(dist[shared])]
        if match is None:
            clusters.append([point, residual, 1, 0.0])
        else:
            cluster = clusters[match]
            cluster[2] += 1
            cluster[3] = max(cluster[3], float(np.abs(cluster[0] - point).max()))
    return clusters


# ---------------------------------------------------------------------------
# Candidate filtering
# ---------------------------------------------------------------------------

# sign changes of one generator matrix: negating A flips x and y, and so on
_SIGN_FLIPS = ((1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1))


def _relation(a: Solution, b: Solution, tol: float) -> Optional[Tuple[bool, bool]]:
    """(conjugated, flipped) if b is an image of a, else None"""
    pa = np.array(a.point)
    pb = np.array(b.point)
    for conjugate in (False, True):
        source = np.conj(pa) if conjugate else pa
        for signs in _SIGN_FLIPS:
            if np.abs(source * np.array(signs) - pb).max() <= tol:
                return conjugate, signs != (1, 1, 1)
    return None


def _canonical_key(solution: Solution):
    return tuple(
        round(c, 8) + 0.0 for v in solution.point for c in (v.real, v.imag)
    )


def _relators_hold(solution: Solution, relators: Sequence[Word], tol: float) -> bool:
    try:
        rep = build_representation(solution.params)
    except DegenerateAxesError:
        return False
    return verify_relators(rep, relators, tol).passed


def filter_candidates(
    solutions: Iterable[Solution],
    relators: Optional[Sequence[Word]] = None,
    tol: float = 1e-6,
) -> List[Solution]:
    """
    Keep complex candidates, optionally those whose relators hold, and collapse
    complex-conjugate and sign-flip images to one representative each.
    """
    kept = [s for s in solutions if Flag.COMPLEX_CANDIDATE in s.flags]
    if relators:
        kept = [s for s in kept if _relators_hold(s, relators, tol)]

    groups: List[Dict] = []
    for solution in kept:
        for group in groups:
            relations = [
                _relation(solution, m, max(tol, 10 * (solution.accuracy + m.accuracy)))
                for m in group["members"]
            ]
            relations = [r for r in relations if r is not None]
            if relations:
                group["members"].append(solution)
                group["conjugate"] |= any(r[0] for r in relations)
                group["orientation"] |= any(r[1] for r in relations)
                break
        else:
            groups.append({"members": [solution], "conjugate": False, "orientation": False})

    result = []
    for group in groups:
        members = group["members"]
        representative = max(members, key=_canonical_key)
        flags = set(representative.flags)
        if group["conjugate"]:
            flags.add(Flag.CONJUGATE)
        if group["orientation"]:
            flags.add(Flag.ORIENTATION)
        result.append(
            replace(
                representative,
                flags=frozenset(flags),
                multiplicity_hint=sum(m.multiplicity_hint for m in members),
            )
        )
    return sorted(result, key=_sort_key)


# ---------------------------------------------------------------------------
# Parametric sweeps
# ---------------------------------------------------------------------------

TABLE_COLUMNS = [
    "order",
    "x_re",
    "x_im",
    "y_re",
    "y_im",
    "z_re",
    "z_im",
    "residual",
    "flags",
    "multiplicity",
    "candidate",
]


def solve_parametric(
    family: Union[CaseSpec, PolySystem],
    values: Sequence,
    config: Optional[SolverConfig] = None,
    verify: bool = True,
    progress: bool = False,
) -> pd.DataFrame:
    """
    Solve a family with one order parameter for each value. A CaseSpec is
    re-assembled per value since an odd word's equation changes form when its
    trace value becomes 0.
    """
    config = config or SolverConfig()
    rows = []
    for value in tqdm(values, desc="orders", disable=not progress):
        if isinstance(family, CaseSpec):
            spec = family.bind({name: value for name in family.parameters})
            system = system_for(spec)
            relators = spec.relators() if verify else None
        else:
            system = family.bind({name: value for name in family.parameters})
            relators = None

        solutions = solve(system, config)
        candidates = {s.point for s in filter_candidates(solutions, relators)}
        for solution in solutions:
            x, y, z = solution.point
            rows.append(
                {
                    "order": value,
                    "x_re": x.real,
                    "x_im": x.imag,
                    "y_re": y.real,
                    "y_im": y.imag,
                    "z_re": z.real,
                    "z_im": z.imag,
                    "residual": solution.residual,
                    "flags": ",".join(sorted(f.value for f in solution.flags)),
                    "multiplicity": solution.multiplicity_hint,
                    "candidate": solution.point in candidates,
                }
            )
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)
