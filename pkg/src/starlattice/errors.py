"""Exception hierarchy shared by every stage of the pipeline."""


class StarLatticeError(Exception):
    """Base class for domain errors (bad inputs, degenerate designs, solver failure)."""


class GeometryError(StarLatticeError):
    pass


class MeshError(StarLatticeError):
    pass


class SolverError(StarLatticeError):
    pass


class ConfigError(StarLatticeError):
    pass
