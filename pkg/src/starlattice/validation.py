"""Analytic oracle battery behind ``starlattice validate``."""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Callable

import numpy as np

from .config import RunConfig
from .fem import assemble, element_axial_forces, line_mesh, solve_supported
from .geometry import RveParams
from .homogenize import Evaluator
from .materials import Material, MaterialTable
from .optimize import OptConfig, OptimizationProblem, alpso_minimize

REFERENCE_DESIGN = RveParams(100.0, 13.34, 23.85, 0.5)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _probe_material(E: float, alpha: float, nu: float = 0.3) -> Material:
    return Material("probe", ((20.0, E),), ((20.0, alpha),), nu)


def check_cantilever(cfg: RunConfig) -> CheckResult:
    L, E, t, P, n = 10.0, 1e9, 1.0, 1.0, 16
    mat = _probe_material(E, 0.0)
    mesh = line_mesh(L, n, t, "aluminium", cfg.kappa)
    sys_ = assemble(mesh, 20.0, 0.0, MaterialTable().uniform(mat))
    u = solve_supported(sys_, [0, 1, 2], {3 * n + 1: P})
    G = E / (2 * (1 + mat.nu))
    exact = P * L**3 / (3 * E * t**3 / 12) + P * L / (cfg.kappa * G * t)
    err = abs(u[3 * n + 1] - exact) / exact
    return CheckResult("timoshenko cantilever", bool(err < 5e-3), f"relative error {err:.2e} (limit 5e-3)")


def check_free_bar(cfg: RunConfig) -> CheckResult:
    L, alpha, dT = 7.0, 1.3e-5, cfg.delta_t
    mat = _probe_material(70e9, alpha)
    mesh = line_mesh(L, 1, 1.0, "aluminium", cfg.kappa, angle=0.4)
    table = MaterialTable().uniform(mat)
    sys_ = assemble(mesh, 20.0 + dT, dT, table)
    u = solve_supported(sys_, [0, 1, 2])
    ext = math.hypot(u[3], u[4])
    err = abs(ext - alpha * dT * L) / (alpha * dT * L)
    stress = float(np.max(np.abs(element_axial_forces(mesh, u, 20.0 + dT, dT, table))))
    ok = bool(err < 1e-10) and stress < 1e-6 * 70e9 * alpha * dT
    return CheckResult("free thermal bar", ok, f"relative error {err:.2e}, residual axial force {stress:.2e}")


def check_single_material(cfg: RunConfig) -> CheckResult:
    inv = cfg.materials.invar
    ev = Evaluator(_with_materials(cfg, cfg.materials.uniform(inv)))
    a = ev(REFERENCE_DESIGN).alpha
    exact = inv.alpha(20.0 + cfg.delta_t)
    err = abs(a - exact) / exact
    return CheckResult("single-material cell", err < 1e-6, f"alpha {a:.6e} vs {exact:.6e} (rel {err:.1e})")


def check_scale_invariance(cfg: RunConfig) -> CheckResult:
    ev = Evaluator(cfg.settings())
    base = ev(REFERENCE_DESIGN)
    worst = 0.0
    for s in (0.1, 3.7):
        p = ev(REFERENCE_DESIGN.scaled(s))
        worst = max(worst, abs(p.nu - base.nu) / abs(base.nu), abs(p.alpha - base.alpha) / abs(base.alpha))
    return CheckResult("scale invariance", worst < 1e-9, f"max relative change {worst:.1e} (limit 1e-9)")


def check_weak_drift(cfg: RunConfig) -> CheckResult:
    base = Evaluator(cfg.settings())(REFERENCE_DESIGN)
    worst = 0.0
    for factor in (10.0, 0.1):
        p = Evaluator(_with_materials(cfg, cfg.materials.with_weak_scaled(factor)))(REFERENCE_DESIGN)
        worst = max(worst, abs(p.nu - base.nu) / abs(base.nu), abs(p.alpha - base.alpha) / abs(base.alpha))
    return CheckResult("weak-material drift", worst < 1e-3, f"max relative change {worst:.1e} (limit 1e-3)")


def _sphere(x):
    return float(x[0] ** 2 + x[1] ** 2)


def _sum_at_least_one(x):
    return float(1.0 - x[0] - x[1])


def _rosenbrock(x):
    return float(100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2)


SPHERE = OptimizationProblem(_sphere, (_sum_at_least_one,), ((-5.0, 5.0), (-5.0, 5.0)), "constrained sphere")
ROSENBROCK = OptimizationProblem(_rosenbrock, (), ((-2.0, 2.0), (-2.0, 2.0)), "rosenbrock")


def check_sphere(cfg: RunConfig) -> CheckResult:
    r = alpso_minimize(SPHERE, OptConfig(max_evaluations=5000), seed=0)
    ok = r.feasible and abs(r.f - 0.5) <= 1e-3 and np.all(np.abs(r.x - 0.5) <= 1e-2)
    return CheckResult("constrained sphere", bool(ok), f"x={r.x.round(4).tolist()} f={r.f:.5f} evals={r.evaluations}")


def check_rosenbrock(cfg: RunConfig) -> CheckResult:
    r = alpso_minimize(ROSENBROCK, OptConfig(max_evaluations=5000), seed=0)
    return CheckResult("rosenbrock", r.f <= 1e-4, f"f={r.f:.2e} evals={r.evaluations}")


def _with_materials(cfg: RunConfig, materials: MaterialTable):
    from dataclasses import replace

    return replace(cfg.settings(), materials=materials)


CHECKS: tuple[tuple[str, Callable[[RunConfig], CheckResult]], ...] = (
    ("timoshenko cantilever", check_cantilever),
    ("free thermal bar", check_free_bar),
    ("single-material cell", check_single_material),
    ("scale invariance", check_scale_invariance),
    ("weak-material drift", check_weak_drift),
    ("constrained sphere", check_sphere),
    ("rosenbrock", check_rosenbrock),
)


def run_validation(cfg: RunConfig | None = None) -> list[CheckResult]:
    cfg = cfg or RunConfig()
    out = []
    for name, check in CHECKS:
        try:
            out.append(check(cfg))
        except Exception as exc:
            out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return out
