"""Run configuration: defaults, JSON config files, and overrides."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import json
import os
from pathlib import Path

from .errors import ConfigError
from .geometry import BOUNDS, Bound, TEMPLATES, DEFAULT_TEMPLATE
from .homogenize import DELTA_T, EvaluationSettings, PRESCRIBED_STRAIN
from .materials import ALPHA_ALUMINIUM_REF, DEFAULT_MATERIALS, MaterialTable
from .mesh import DEFAULT_SEED_FACTOR, SHEAR_CORRECTION
from .optimize import OptConfig

OUTPUT_ENV = "STARLATTICE_OUTPUT_DIR"


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, "results")


@dataclass(frozen=True)
class RunConfig:
    materials: MaterialTable = DEFAULT_MATERIALS
    alpha_ref: float = ALPHA_ALUMINIUM_REF
    delta_t: float = DELTA_T
    seed_factor: float = DEFAULT_SEED_FACTOR
    kappa: float = SHEAR_CORRECTION
    prescribed_strain: float = PRESCRIBED_STRAIN
    template: str = DEFAULT_TEMPLATE.name
    bounds: tuple[Bound, ...] = BOUNDS
    optimizer: OptConfig = field(default_factory=OptConfig)
    output_dir: str = field(default_factory=default_output_dir)

    def __post_init__(self):
        if self.template not in TEMPLATES:
            raise ConfigError(f"unknown lattice template {self.template!r}; choose from {', '.join(TEMPLATES)}")
        for name in ("alpha_ref", "delta_t", "seed_factor", "prescribed_strain"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if not self.seed_factor <= 1.0:
            raise ConfigError("seed_factor must lie in (0, 1]")
        for b in self.bounds:
            if not b.lo < b.hi:
                raise ConfigError(f"bound for {b.name} must satisfy lo < hi")

    def settings(self) -> EvaluationSettings:
        return EvaluationSettings(
            materials=self.materials,
            seed_factor=self.seed_factor,
            kappa=self.kappa,
            delta_t=self.delta_t,
            alpha_ref=self.alpha_ref,
            prescribed_strain=self.prescribed_strain,
            template=self.template,
        )

    def to_dict(self) -> dict:
        return {
            "materials": self.materials.to_dict(),
            "alpha_ref": self.alpha_ref,
            "delta_t": self.delta_t,
            "seed_factor": self.seed_factor,
            "kappa": self.kappa,
            "prescribed_strain": self.prescribed_strain,
            "template": self.template,
            "bounds": {b.name: [b.lo, b.hi] for b in self.bounds},
            "optimizer": self.optimizer.to_dict(),
            "output_dir": self.output_dir,
        }

    def merged(self, data: dict) -> "RunConfig":
        """Copy with values from a (possibly partial) config document applied."""
        if not isinstance(data, dict):
            raise ConfigError("config document must be a JSON object")
        known = set(self.to_dict())
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        kw = {}
        if "materials" in data:
            merged = {**self.materials.to_dict(), **data["materials"]}
            kw["materials"] = MaterialTable.from_dict(merged)
        for k in ("alpha_ref", "delta_t", "seed_factor", "kappa", "prescribed_strain"):
            if k in data:
                kw[k] = _number(k, data[k])
        if "template" in data:
            kw["template"] = str(data["template"])
        if "output_dir" in data:
            kw["output_dir"] = str(data["output_dir"])
        if "bounds" in data:
            current = {b.name: (b.lo, b.hi) for b in self.bounds}
            for name, pair in data["bounds"].items():
                if name not in current:
                    raise ConfigError(f"unknown design variable {name!r} in bounds")
                try:
                    lo, hi = (float(v) for v in pair)
                except (TypeError, ValueError):
                    raise ConfigError(f"bounds for {name} must be [lo, hi]") from None
                current[name] = (lo, hi)
            kw["bounds"] = tuple(Bound(n, lo, hi) for n, (lo, hi) in current.items())
        if "optimizer" in data:
            kw["optimizer"] = OptConfig.from_dict({**self.optimizer.to_dict(), **data["optimizer"]})
        return replace(self, **kw)


def _number(name, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number")
    return float(v)


def load_config(path=None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return cfg.merged(data)


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"
