"""Lattice design problems: objectives and constraints on (nu, NCTE)."""
from __future__ import annotations

from dataclasses import dataclass
import re

import numpy as np

from ..errors import ConfigError
from ..geometry import BOUNDS, Bound, RveParams
from ..homogenize import DEFAULT_SETTINGS, EvaluationSettings, get_evaluator
from .core import OptimizationProblem

OBJECTIVES = ("min-pr", "max-pr", "min-ncte", "max-ncte", "near-zero-ncte")
_QUANTITY_ALIASES = {"pr": "nu", "nu": "nu", "ncte": "ncte"}
_CONSTRAINT_RE = re.compile(r"^\s*(pr|nu|ncte)\s*(>=|<=)\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$", re.I)


def _props(x, settings: EvaluationSettings, counted: bool):
    return get_evaluator(settings)(RveParams.from_sequence(x), count=counted)


@dataclass(frozen=True)
class DesignObjective:
    name: str
    settings: EvaluationSettings = DEFAULT_SETTINGS

    def __post_init__(self):
        if self.name not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.name!r}; choose from {', '.join(OBJECTIVES)}")

    def __call__(self, x) -> float:
        return self.from_props(_props(x, self.settings, True))

    def from_props(self, p) -> float:
        return {
            "min-pr": p.nu,
            "max-pr": -p.nu,
            "min-ncte": p.ncte,
            "max-ncte": -p.ncte,
            "near-zero-ncte": p.ncte**2,
        }[self.name]


@dataclass(frozen=True)
class DesignConstraint:
    quantity: str  # "nu" or "ncte"
    op: str  # ">=" or "<="
    threshold: float
    settings: EvaluationSettings = DEFAULT_SETTINGS

    def __call__(self, x) -> float:
        return self.from_props(_props(x, self.settings, False))

    def from_props(self, p) -> float:
        q = p.nu if self.quantity == "nu" else p.ncte
        return self.threshold - q if self.op == ">=" else q - self.threshold

    def __str__(self) -> str:
        name = "pr" if self.quantity == "nu" else "ncte"
        return f"{name}{self.op}{self.threshold:g}"

    def with_settings(self, settings: EvaluationSettings) -> "DesignConstraint":
        return DesignConstraint(self.quantity, self.op, self.threshold, settings)


def parse_constraint(text: str, settings: EvaluationSettings = DEFAULT_SETTINGS) -> DesignConstraint:
    m = _CONSTRAINT_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse constraint {text!r}; expected e.g. 'ncte>=-0.1' or 'pr<=0'")
    return DesignConstraint(_QUANTITY_ALIASES[m.group(1).lower()], m.group(2), float(m.group(3)), settings)


@dataclass(frozen=True)
class DesignProblem(OptimizationProblem):
    settings: EvaluationSettings = DEFAULT_SETTINGS

    def decode(self, x: np.ndarray) -> RveParams:
        return RveParams.from_sequence(x)


def design_problem(
    objective: str,
    constraints=(),
    settings: EvaluationSettings = DEFAULT_SETTINGS,
    bounds: tuple[Bound, ...] = BOUNDS,
    label: str = "",
) -> DesignProblem:
    cons = tuple(
        parse_constraint(c, settings) if isinstance(c, str) else c.with_settings(settings) for c in constraints
    )
    return DesignProblem(
        objective=DesignObjective(objective, settings),
        constraints=cons,
        bounds=tuple((b.lo, b.hi) for b in bounds),
        label=label or " ".join([objective, *map(str, cons)]),
        settings=settings,
    )
