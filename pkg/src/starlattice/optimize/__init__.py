from .core import OptConfig, OptimizationProblem, OptResult, augmented_lagrangian
from .design import OBJECTIVES, DesignConstraint, DesignObjective, design_problem, parse_constraint
from .harmony import alhso_minimize
from .pso import alpso_minimize
from .compare import COMPARE_OBJECTIVES, compare_optimizers, report_csv

OPTIMIZERS = {"alpso": alpso_minimize, "alhso": alhso_minimize}

__all__ = [
    "OBJECTIVES",
    "OPTIMIZERS",
    "DesignConstraint",
    "DesignObjective",
    "OptConfig",
    "OptResult",
    "OptimizationProblem",
    "COMPARE_OBJECTIVES",
    "alhso_minimize",
    "compare_optimizers",
    "report_csv",
    "alpso_minimize",
    "augmented_lagrangian",
    "design_problem",
    "parse_constraint",
]
