"""Effective Poisson's ratio and thermal expansion of a periodic cell."""
from __future__ import annotations

from dataclasses import dataclass, field
import math
import threading

from .errors import SolverError
from .fem import assemble, build_pbc_constraints, solve_constrained, SolutionField
from .geometry import RveParams, build_rve, DEFAULT_TEMPLATE, LatticeTemplate
from .materials import (
    ALPHA_ALUMINIUM_REF,
    DEFAULT_MATERIALS,
    FINAL_TEMPERATURE,
    REFERENCE_TEMPERATURE,
    MaterialTable,
)
from .mesh import DEFAULT_SEED_FACTOR, SHEAR_CORRECTION, Mesh, mesh_rve

DELTA_T = FINAL_TEMPERATURE - REFERENCE_TEMPERATURE
PRESCRIBED_STRAIN = 1e-3
SYMMETRY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class EvaluationSettings:
    """Everything besides the design variables that changes the answer."""

    materials: MaterialTable = DEFAULT_MATERIALS
    seed_factor: float = DEFAULT_SEED_FACTOR
    kappa: float = SHEAR_CORRECTION
    delta_t: float = DELTA_T
    alpha_ref: float = ALPHA_ALUMINIUM_REF
    prescribed_strain: float = PRESCRIBED_STRAIN
    template: str = DEFAULT_TEMPLATE.name


DEFAULT_SETTINGS = EvaluationSettings()


@dataclass(frozen=True)
class HomogenizedProps:
    nu: float
    alpha: float
    ncte: float
    diagnostics: dict = field(default_factory=dict, compare=False)


def ncte(alpha: float, alpha_ref: float = ALPHA_ALUMINIUM_REF) -> float:
    return alpha / alpha_ref


def poisson_from_extensions(dx: float, dy: float) -> float:
    if abs(dx) < 1e-15:
        raise SolverError("prescribed extension is too small to define a Poisson's ratio")
    return -dy / dx


def cte_from_extension(delta_l: float, length: float, delta_t: float) -> float:
    return delta_l / (length * delta_t)


def mechanical_solution(mesh: Mesh, settings: EvaluationSettings = DEFAULT_SETTINGS, strain: float | None = None):
    system = assemble(mesh, REFERENCE_TEMPERATURE, 0.0, settings.materials)
    cons = build_pbc_constraints(mesh)
    eps = settings.prescribed_strain if strain is None else strain
    return solve_constrained(system, cons, prescribed_dx=eps * mesh.edge_length)


def thermal_solution(mesh: Mesh, settings: EvaluationSettings = DEFAULT_SETTINGS) -> SolutionField:
    system = assemble(mesh, REFERENCE_TEMPERATURE + settings.delta_t, settings.delta_t, settings.materials)
    return solve_constrained(system, build_pbc_constraints(mesh))


def poissons_ratio(mesh: Mesh, settings: EvaluationSettings = DEFAULT_SETTINGS, strain: float | None = None) -> float:
    sol = mechanical_solution(mesh, settings, strain)
    return poisson_from_extensions(sol.dx, sol.dy)


def _thermal_extension(sol: SolutionField) -> float:
    if abs(sol.dx - sol.dy) > SYMMETRY_TOLERANCE * abs(sol.dx):
        raise SolverError(
            f"thermal extensions differ (dx={sol.dx:.6e}, dy={sol.dy:.6e}); geometry or constraints are not square symmetric"
        )
    return sol.dx


def cte(mesh: Mesh, settings: EvaluationSettings = DEFAULT_SETTINGS) -> float:
    sol = thermal_solution(mesh, settings)
    return cte_from_extension(_thermal_extension(sol), mesh.edge_length, settings.delta_t)


def _evaluate(params: RveParams, settings: EvaluationSettings) -> HomogenizedProps:
    model = build_rve(params, settings.template)
    mesh = mesh_rve(model, settings.seed_factor, settings.kappa)
    mech = mechanical_solution(mesh, settings)
    therm = thermal_solution(mesh, settings)
    nu = poisson_from_extensions(mech.dx, mech.dy)
    alpha = cte_from_extension(_thermal_extension(therm), mesh.edge_length, settings.delta_t)
    diag = {
        "elements": mesh.n_elements,
        "nodes": mesh.n_nodes,
        "edge_length": mesh.edge_length,
        "residual_mechanical": mech.residual,
        "residual_thermal": therm.residual,
        "constraint_error_mechanical": mech.constraint_error,
        "constraint_error_thermal": therm.constraint_error,
        "dx_thermal": therm.dx,
        "dy_thermal": therm.dy,
    }
    return HomogenizedProps(nu, alpha, ncte(alpha, settings.alpha_ref), diag)


def _key(params: RveParams) -> tuple:
    return tuple(float(v).hex() for v in params.as_tuple())


class Evaluator:
    """Memoised design evaluation for one set of settings.

    ``calls`` counts every counted request, ``misses`` the ones that ran the
    solver. Errors are cached too, so a bad design is rejected cheaply.
    """

    def __init__(self, settings: EvaluationSettings = DEFAULT_SETTINGS):
        self.settings = settings
        self._cache: dict = {}
        self._lock = threading.Lock()
        self.calls = 0
        self.misses = 0

    def __call__(self, params: RveParams, count: bool = True) -> HomogenizedProps:
        key = _key(params)
        with self._lock:
            if count:
                self.calls += 1
            hit = self._cache.get(key)
        if hit is None:
            try:
                hit = _evaluate(params, self.settings)
            except Exception as exc:  # cached, then re-raised
                hit = exc
            with self._lock:
                self.misses += 1
                self._cache[key] = hit
        if isinstance(hit, Exception):
            raise hit
        return hit

    def reset_counters(self) -> None:
        with self._lock:
            self.calls = 0
            self.misses = 0

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()
            self.calls = 0
            self.misses = 0


_evaluators: dict = {}


def get_evaluator(settings: EvaluationSettings = DEFAULT_SETTINGS) -> Evaluator:
    ev = _evaluators.get(settings)
    if ev is None:
        ev = _evaluators.setdefault(settings, Evaluator(settings))
    return ev


def evaluate_design(params: RveParams, settings: EvaluationSettings = DEFAULT_SETTINGS) -> HomogenizedProps:
    """Build, mesh and solve both load cases; memoised per settings."""
    return get_evaluator(settings)(params)


def finite_props(p: HomogenizedProps) -> bool:
    return math.isfinite(p.nu) and math.isfinite(p.alpha)
