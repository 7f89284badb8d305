"""Beam-based periodic homogenization and design optimization of a bi-material star lattice."""
from .errors import ConfigError, GeometryError, MeshError, SolverError, StarLatticeError
from .geometry import BOUNDS, RveParams, build_rve, rve_edge_length, validate_params
from .homogenize import EvaluationSettings, HomogenizedProps, evaluate_design
from .kernels import BACKEND, available_backends, set_backend
from .mesh import mesh_rve

__all__ = [
    "BACKEND",
    "available_backends",
    "set_backend",
    "BOUNDS",
    "ConfigError",
    "EvaluationSettings",
    "GeometryError",
    "HomogenizedProps",
    "MeshError",
    "RveParams",
    "SolverError",
    "StarLatticeError",
    "build_rve",
    "evaluate_design",
    "mesh_rve",
    "rve_edge_length",
    "validate_params",
]
