"""Shared machinery for the augmented Lagrangian optimizers."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, asdict
import math
from typing import Callable, Sequence

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class OptConfig:
    swarm_size: int = 40
    max_outer: int = 50
    inner_iterations: int = 10
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    cognitive: float = 1.5
    social: float = 1.5
    velocity_clamp: float = 0.25
    penalty_growth: float = 2.0
    initial_penalty: float = 1.0
    max_penalty: float = 1e8
    max_multiplier: float = 1e8
    constraint_tol: float = 1e-4
    stall_tol: float = 1e-4
    stall_iterations: int = 3
    max_evaluations: int = 3000
    memory_size: int = 20
    consideration_rate: float = 0.9
    pitch_rate: float = 0.35
    bandwidth: float = 0.05
    bandwidth_end: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "seed":
                if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                    raise ConfigError(f"seed must be a non-negative integer, got {v!r}")
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float, np.integer, np.floating)):
                raise ConfigError(f"optimizer setting {f.name} must be a number, got {v!r}")
            if f.type == "int" and not isinstance(v, (int, np.integer)):
                raise ConfigError(f"optimizer setting {f.name} must be an integer, got {v!r}")
            if not math.isfinite(v) or v <= 0:
                raise ConfigError(f"optimizer setting {f.name} must be finite and > 0, got {v!r}")
        for name in ("consideration_rate", "pitch_rate"):
            if getattr(self, name) > 1.0:
                raise ConfigError(f"{name} must lie in (0, 1]")
        if self.inertia_end > self.inertia_start:
            raise ConfigError("inertia must not increase over the run")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "OptConfig":
        known = {f.name: f.type for f in fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise ConfigError(f"unknown optimizer setting(s): {', '.join(sorted(unknown))}")
        return cls(**data)


@dataclass(frozen=True)
class OptimizationProblem:
    """Minimise ``objective(x)`` subject to ``g(x) <= 0`` for each constraint."""

    objective: Callable[[np.ndarray], float]
    constraints: tuple[Callable[[np.ndarray], float], ...]
    bounds: tuple[tuple[float, float], ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds))
        for lo, hi in self.bounds:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ConfigError(f"invalid bounds [{lo}, {hi}]")

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    def evaluate(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        f = float(self.objective(x))
        g = np.array([float(c(x)) for c in self.constraints])
        return f, g

    def certify(self, x: np.ndarray) -> np.ndarray:
        """Constraint values by direct re-evaluation (not counted as an evaluation)."""
        return np.array([float(c(x)) for c in self.constraints])

    def decode(self, x: np.ndarray):
        return None


def augmented_lagrangian(f: float, g, lam, r) -> float:
    g = np.asarray(g, dtype=float)
    lam = np.asarray(lam, dtype=float)
    r = np.asarray(r, dtype=float)
    if not (g.shape == lam.shape == r.shape):
        raise ValueError("g, multipliers and penalties must have matching lengths")
    if g.size == 0:
        return float(f)
    if np.any(r <= 0):
        raise ValueError("penalties must be > 0")
    theta = np.maximum(g, -lam / (2.0 * r))
    return float(f + np.sum(lam * theta) + np.sum(r * theta * theta))


def _lagrangian_rows(f: np.ndarray, g: np.ndarray, lam: np.ndarray, r: np.ndarray) -> np.ndarray:
    if g.shape[1] == 0:
        return f.copy()
    theta = np.maximum(g, -lam / (2.0 * r))
    return f + theta @ lam + (theta * theta) @ r


@dataclass(frozen=True)
class OptResult:
    x: np.ndarray
    f: float
    g: np.ndarray
    evaluations: int
    history: tuple[dict, ...]
    feasible: bool
    optimizer: str
    seed: int
    label: str = ""
    design: object = None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "optimizer": self.optimizer,
            "seed": self.seed,
            "x": self.x.tolist(),
            "f": self.f,
            "g": self.g.tolist(),
            "evaluations": self.evaluations,
            "feasible": self.feasible,
            "history": list(self.history),
        }

    def same_as(self, other: "OptResult") -> bool:
        return self.to_dict() == other.to_dict()


def _safe_evaluate(problem: OptimizationProblem, x: np.ndarray):
    try:
        f, g = problem.evaluate(x)
    except Exception:  # errored designs become penalised points
        return None
    if not math.isfinite(f) or not np.all(np.isfinite(g)):
        return None
    return f, g


class Engine:
    """Evaluation bookkeeping common to both optimizers.

    Points are evaluated in batches and reduced in submission order, so the
    outcome does not depend on how many worker processes are used.
    """

    def __init__(self, problem: OptimizationProblem, config: OptConfig, workers: int = 1):
        self.problem = problem
        self.config = config
        self.m = len(problem.constraints)
        self.evaluations = 0
        self.f_min = math.inf
        self.f_max = -math.inf
        self.best_x = None
        self.best_f = math.inf
        self.best_g = None
        self.best_feasible = False
        self.best_violation = math.inf
        self._pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
        self.lam = np.zeros(self.m)
        self.r = np.full(self.m, config.initial_penalty)

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def budget_left(self) -> int:
        return self.config.max_evaluations - self.evaluations

    def evaluate(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self._pool is not None and len(xs) > 1:
            raw = list(self._pool.map(_safe_evaluate, [self.problem] * len(xs), list(xs)))
        else:
            raw = [_safe_evaluate(self.problem, x) for x in xs]
        self.evaluations += len(xs)
        f = np.empty(len(xs))
        g = np.empty((len(xs), self.m))
        for i, (x, res) in enumerate(zip(xs, raw)):
            if res is None:
                span = self.f_max - self.f_min if self.f_max > self.f_min else 1.0
                worst = self.f_max if math.isfinite(self.f_max) else 0.0
                f[i] = worst + 10.0 * span
                g[i] = 1.0
                continue
            fi, gi = res
            f[i], g[i] = fi, gi
            self.f_min = min(self.f_min, fi)
            self.f_max = max(self.f_max, fi)
            self._track(x, fi, gi)
        return f, g

    def _track(self, x, f, g):
        viol = float(np.max(g)) if g.size else -math.inf
        feasible = viol <= self.config.constraint_tol
        if feasible:
            if not self.best_feasible or f < self.best_f:
                self.best_x, self.best_f, self.best_g = x.copy(), f, g.copy()
                self.best_feasible = True
                self.best_violation = max(viol, 0.0)
        elif not self.best_feasible and max(viol, 0.0) < self.best_violation:
            self.best_x, self.best_f, self.best_g = x.copy(), f, g.copy()
            self.best_violation = max(viol, 0.0)

    def lagrangian(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        return _lagrangian_rows(f, g, self.lam, self.r)

    def update_multipliers(self, g_best: np.ndarray, prev_violation: np.ndarray) -> np.ndarray:
        if self.m == 0:
            return prev_violation
        c = self.config
        theta = np.maximum(g_best, -self.lam / (2.0 * self.r))
        self.lam = np.clip(self.lam + 2.0 * self.r * theta, -c.max_multiplier, c.max_multiplier)
        violation = np.maximum(g_best, 0.0)
        stalled = (violation > c.constraint_tol) & (violation >= prev_violation)
        self.r = np.where(stalled, np.minimum(self.r * c.penalty_growth, c.max_penalty), self.r)
        return violation

    def progress(self, outer: int) -> float:
        c = self.config
        return min(1.0, max(outer / c.max_outer, self.evaluations / c.max_evaluations))

    def snapshot(self, outer: int, lagrangian_value: float, g_best: np.ndarray) -> dict:
        return {
            "outer": outer,
            "evaluations": self.evaluations,
            "lagrangian": float(lagrangian_value),
            "best_objective": float(self.best_f) if self.best_feasible else None,
            "max_violation": float(np.max(g_best)) if g_best.size else 0.0,
            "multipliers": self.lam.tolist(),
            "penalties": self.r.tolist(),
        }

    def result(self, history: list, name: str, seed: int) -> OptResult:
        p = self.problem
        if self.best_x is None:
            x = 0.5 * (p.lower + p.upper)
            return OptResult(x, math.inf, np.full(self.m, math.inf), self.evaluations, tuple(history), False, name, seed, p.label, p.decode(x))
        try:
            g_check = p.certify(self.best_x)
            feasible = bool(np.all(g_check <= self.config.constraint_tol))
        except Exception:
            g_check, feasible = self.best_g, False
        return OptResult(
            self.best_x.copy(), float(self.best_f), np.asarray(g_check, dtype=float), self.evaluations,
            tuple(history), feasible, name, seed, p.label, p.decode(self.best_x),
        )


STALL_FLOOR = 1e-12


def stalled(values: Sequence[float], feasible_flags: Sequence[bool], tol: float, count: int) -> bool:
    """True when the last ``count`` relative changes are all below tol while feasible."""
    if len(values) < count + 1:
        return False
    for k in range(len(values) - count, len(values)):
        a, b = values[k - 1], values[k]
        if not feasible_flags[k] or abs(b - a) >= tol * max(abs(b), STALL_FLOOR):
            return False
    return True


def initial_points(problem: OptimizationProblem, n: int, rngs, warm_start=None) -> np.ndarray:
    lo, hi = problem.lower, problem.upper
    x = np.array([lo + (hi - lo) * rng.random(len(lo)) for rng in rngs[:n]])
    if warm_start is not None:
        w = np.atleast_2d(np.asarray(warm_start, dtype=float))[:n]
        x[: len(w)] = np.clip(w, lo, hi)
    return x
