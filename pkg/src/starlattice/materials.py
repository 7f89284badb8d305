"""Temperature dependent constituent properties.

Each property is tabulated against temperature in degrees Celsius and looked
up by linear interpolation, clamped to the end points outside the table.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .errors import ConfigError

REFERENCE_TEMPERATURE = 20.0
FINAL_TEMPERATURE = 200.0
ALPHA_ALUMINIUM_REF = 23.0e-6


@dataclass(frozen=True)
class Material:
    name: str
    e_points: tuple[tuple[float, float], ...]
    alpha_points: tuple[tuple[float, float], ...]
    nu: float

    def __post_init__(self):
        object.__setattr__(self, "e_points", _as_table(self.e_points, self.name, "E"))
        object.__setattr__(self, "alpha_points", _as_table(self.alpha_points, self.name, "alpha"))
        if any(e <= 0.0 for _, e in self.e_points):
            raise ConfigError(f"{self.name}: Young's modulus must be > 0")
        if not -1.0 < self.nu < 0.5:
            raise ConfigError(f"{self.name}: Poisson's ratio must lie in (-1, 0.5), got {self.nu}")

    def youngs_modulus(self, temperature: float) -> float:
        return _interp(self.e_points, temperature)

    def alpha(self, temperature: float) -> float:
        """Secant CTE referenced to 20 degC."""
        return _interp(self.alpha_points, temperature)

    def shear_modulus(self, temperature: float) -> float:
        return self.youngs_modulus(temperature) / (2.0 * (1.0 + self.nu))

    def scaled(self, e_factor: float) -> "Material":
        return replace(self, e_points=tuple((T, e * e_factor) for T, e in self.e_points))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "e_points": [list(p) for p in self.e_points],
            "alpha_points": [list(p) for p in self.alpha_points],
            "nu": self.nu,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Material":
        try:
            return cls(
                name=str(data["name"]),
                e_points=tuple(tuple(map(float, p)) for p in data["e_points"]),
                alpha_points=tuple(tuple(map(float, p)) for p in data["alpha_points"]),
                nu=float(data["nu"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed material entry: {exc}") from exc


def _as_table(points, name, what):
    table = tuple((float(T), float(v)) for T, v in points)
    if not table:
        raise ConfigError(f"{name}: {what} table is empty")
    temps = [T for T, _ in table]
    if any(not math.isfinite(v) for p in table for v in p):
        raise ConfigError(f"{name}: {what} table has non-finite entries")
    if any(b <= a for a, b in zip(temps, temps[1:])):
        raise ConfigError(f"{name}: {what} temperatures must be strictly increasing")
    return table


def _interp(table, temperature):
    temps = [T for T, _ in table]
    values = [v for _, v in table]
    return float(np.interp(temperature, temps, values))


ALUMINIUM = Material(
    name="Al 7075",
    e_points=((20.0, 71.0e9), (200.0, 66.0e9)),
    alpha_points=((20.0, 23.0e-6), (200.0, 24.3e-6)),
    nu=0.33,
)

INVAR = Material(
    name="Invar",
    e_points=((20.0, 144.0e9), (200.0, 135.0e9)),
    alpha_points=((20.0, 1.1e-6), (200.0, 2.5e-6)),
    nu=0.29,
)

# fictitious filler for the corner beams
WEAK = Material(
    name="weak",
    e_points=((20.0, 1.0e3),),
    alpha_points=((20.0, 1.0e-6),),
    nu=0.3,
)


@dataclass(frozen=True)
class MaterialTable:
    """Maps the material ids used by lattice members to constituent data."""

    aluminium: Material = ALUMINIUM
    invar: Material = INVAR
    weak: Material = WEAK
    extra: dict = field(default_factory=dict, compare=False, hash=False)

    def __getitem__(self, key: str) -> Material:
        if key in ("aluminium", "invar", "weak"):
            return getattr(self, key)
        try:
            return self.extra[key]
        except KeyError:
            raise ConfigError(f"unknown material id {key!r}") from None

    def ids(self) -> tuple[str, ...]:
        return ("aluminium", "invar", "weak", *sorted(self.extra))

    def uniform(self, material: Material) -> "MaterialTable":
        """Every member made of ``material`` (used by single-material checks)."""
        return MaterialTable(aluminium=material, invar=material, weak=material)

    def with_weak_scaled(self, factor: float) -> "MaterialTable":
        return replace(self, weak=self.weak.scaled(factor))

    def to_dict(self) -> dict:
        return {k: self[k].to_dict() for k in self.ids()}

    @classmethod
    def from_dict(cls, data: dict) -> "MaterialTable":
        base = cls()
        kwargs = {}
        extra = {}
        for key, entry in data.items():
            mat = Material.from_dict(entry)
            if key in ("aluminium", "invar", "weak"):
                kwargs[key] = mat
            else:
                extra[key] = mat
        return replace(base, **kwargs, extra=extra)


DEFAULT_MATERIALS = MaterialTable()
