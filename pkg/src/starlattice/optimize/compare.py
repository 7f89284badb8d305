"""Side-by-side runs of both optimizers on the single-objective problems."""
from __future__ import annotations

import csv
import io

from ..homogenize import DEFAULT_SETTINGS, EvaluationSettings, get_evaluator
from .core import OptConfig
from .design import design_problem
from .harmony import alhso_minimize
from .pso import alpso_minimize

COMPARE_OBJECTIVES = ("min-pr", "min-ncte", "near-zero-ncte")
REPORT_COLUMNS = (
    "objective", "optimizer", "seed", "h1", "h2", "theta_deg", "t",
    "evaluations", "objective_calls", "nu", "ncte", "cte", "feasible",
)


def compare_optimizers(
    objectives=COMPARE_OBJECTIVES,
    seeds=(0,),
    config: OptConfig | None = None,
    settings: EvaluationSettings = DEFAULT_SETTINGS,
    workers: int = 1,
) -> list[dict]:
    """One report row per (objective, optimizer, seed).

    ``objective_calls`` is the number of objective requests seen by the
    memo layer during the run; it is only observable in-process, so it is
    left empty when evaluations run in worker processes.
    """
    config = config or OptConfig()
    evaluator = get_evaluator(settings)
    rows = []
    for obj in objectives:
        for name, run in (("alpso", alpso_minimize), ("alhso", alhso_minimize)):
            for seed in seeds:
                before = evaluator.calls
                res = run(design_problem(obj, (), settings), config, seed=seed, workers=workers)
                calls = evaluator.calls - before if workers <= 1 else ""
                props = evaluator(res.design, count=False)
                rows.append(
                    {
                        "objective": obj,
                        "optimizer": name,
                        "seed": seed,
                        "h1": res.design.h1,
                        "h2": res.design.h2,
                        "theta_deg": res.design.theta,
                        "t": res.design.t,
                        "evaluations": res.evaluations,
                        "objective_calls": calls,
                        "nu": props.nu,
                        "ncte": props.ncte,
                        "cte": props.alpha,
                        "feasible": res.feasible,
                    }
                )
    return rows


def report_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else ("true" if v is True else "false" if v is False else v)) for k, v in r.items()})
    return buf.getvalue()
