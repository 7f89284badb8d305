"""Design envelope: a sweep of constrained optimizations over (nu, NCTE)."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields, asdict
import hashlib
import io
import json
import logging
import math
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigError, StarLatticeError
from .geometry import BOUNDS, Bound, RveParams
from .homogenize import DEFAULT_SETTINGS, EvaluationSettings, get_evaluator
from .optimize import OPTIMIZERS, OptConfig, design_problem, parse_constraint
from .optimize.design import OBJECTIVES, DesignObjective

log = logging.getLogger(__name__)

CSV_HEADER = ("label", "h1", "h2", "theta_deg", "t", "nu", "ncte", "evaluations", "feasible", "seed")
WARM_FRACTION = 0.2
WARM_SPREAD = 0.02


@dataclass(frozen=True)
class ScheduledProblem:
    label: str
    objective: str
    constraints: tuple[str, ...] = ()

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"{self.label}: unknown objective {self.objective!r}")
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            parse_constraint(c)

    def family(self) -> tuple:
        """Objective plus constraint quantities/directions; thresholds excluded."""
        parsed = [parse_constraint(c) for c in self.constraints]
        return (self.objective, tuple((c.quantity, c.op) for c in parsed))

    def thresholds(self) -> tuple[float, ...]:
        return tuple(parse_constraint(c).threshold for c in self.constraints)


@dataclass(frozen=True)
class EnvelopeSchedule:
    problems: tuple[ScheduledProblem, ...]

    def __post_init__(self):
        object.__setattr__(self, "problems", tuple(self.problems))
        labels = [p.label for p in self.problems]
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        if dupes:
            raise ConfigError(f"duplicate schedule label(s): {', '.join(dupes)}")
        for run in self.families():
            ts = [p.thresholds() for p in run]
            if len(ts) < 2 or not ts[0]:
                continue
            diffs = [np.sign(np.subtract(b, a)) for a, b in zip(ts, ts[1:])]
            if any(np.any(d == 0) for d in diffs) or len({tuple(d) for d in diffs}) > 1:
                raise ConfigError(f"thresholds of family starting at {run[0].label!r} are not strictly ordered")

    def __len__(self) -> int:
        return len(self.problems)

    def families(self) -> list[list[ScheduledProblem]]:
        """Maximal runs of consecutive problems sharing a family."""
        runs: list[list[ScheduledProblem]] = []
        for p in self.problems:
            if runs and runs[-1][-1].family() == p.family():
                runs[-1].append(p)
            else:
                runs.append([p])
        return runs

    def to_list(self) -> list[dict]:
        return [{"label": p.label, "objective": p.objective, "constraints": list(p.constraints)} for p in self.problems]

    @classmethod
    def from_list(cls, data) -> "EnvelopeSchedule":
        if not isinstance(data, list):
            raise ConfigError("schedule document must be a list of problems")
        try:
            return cls(tuple(ScheduledProblem(d["label"], d["objective"], tuple(d.get("constraints", ()))) for d in data))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed schedule entry: {exc}") from None

    @classmethod
    def load(cls, path) -> "EnvelopeSchedule":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read schedule {path}: {exc}") from None
        return cls.from_list(data.get("problems", data) if isinstance(data, dict) else data)


def default_problem_schedule() -> EnvelopeSchedule:
    P = ScheduledProblem
    probs = [P("PR MAX", "max-pr"), P("NCTE MAX", "max-ncte")]
    for c in (0.25, 0.2, 0.1, -0.01, -0.025, -0.05, -0.1, -0.2):
        probs.append(P(f"PR MIN (NCTE >= {c:g})", "min-pr", (f"ncte>={c:g}",)))
    probs.append(P("PR MIN", "min-pr"))
    for c in (-0.3, -0.4, -0.5, -0.6):
        probs.append(P(f"PR MIN (NCTE <= {c:g})", "min-pr", (f"ncte<={c:g}",)))
    probs.append(P("NCTE MIN", "min-ncte"))
    for c in (-0.25, -0.2, -0.15, -0.1, -0.05):
        probs.append(P(f"NCTE MIN (PR >= {c:g})", "min-ncte", (f"pr>={c:g}",)))
    probs.append(P("PR MAX (negative NCTE)", "max-pr", ("ncte<=0",)))
    return EnvelopeSchedule(tuple(probs))


@dataclass(frozen=True)
class EnvelopePoint:
    label: str
    h1: float
    h2: float
    theta_deg: float
    t: float
    nu: float
    ncte: float
    evaluations: int
    feasible: bool
    seed: int

    @property
    def params(self) -> RveParams:
        return RveParams(self.h1, self.h2, self.theta_deg, self.t)


def problem_seed(master_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:4], "big") & 0x7FFFFFFF


def _warm_points(best: np.ndarray, n: int, bounds: tuple[Bound, ...], seed: int) -> np.ndarray:
    lo = np.array([b.lo for b in bounds])
    hi = np.array([b.hi for b in bounds])
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    pts = [best]
    for _ in range(n - 1):
        pts.append(np.clip(best + WARM_SPREAD * (hi - lo) * rng.standard_normal(len(best)), lo, hi))
    return np.array(pts)


def build_envelope(
    schedule: EnvelopeSchedule,
    config: OptConfig | None = None,
    seed: int = 0,
    *,
    settings: EvaluationSettings = DEFAULT_SETTINGS,
    bounds: tuple[Bound, ...] = BOUNDS,
    optimizer: str = "alpso",
    warm_start: bool = True,
    share_incumbents: bool = True,
    workers: int = 1,
    progress: Callable[[int, int, EnvelopePoint], None] | None = None,
) -> list[EnvelopePoint]:
    """Solve each scheduled problem and return one point per problem, in order.

    With ``warm_start`` a problem reuses the previous best of the same
    objective for 20% of its initial population. With ``share_incumbents``
    every problem finally adopts the best design found by any problem of the
    same objective that also satisfies its own constraints, which keeps the
    frontier monotone when constraints are nested.
    """
    config = config or OptConfig()
    run = OPTIMIZERS[optimizer]
    n_pop = config.swarm_size if optimizer == "alpso" else config.memory_size
    n_warm = max(1, int(round(WARM_FRACTION * n_pop)))
    evaluator = get_evaluator(settings)

    problems = [design_problem(p.objective, p.constraints, settings, bounds, p.label) for p in schedule.problems]
    bests: list[np.ndarray | None] = []
    evals: list[int] = []
    seeds: list[int] = []
    last_by_objective: dict[str, np.ndarray] = {}
    for sp, prob in zip(schedule.problems, problems):
        s = problem_seed(seed, sp.label)
        warm = None
        if warm_start and sp.objective in last_by_objective:
            warm = _warm_points(last_by_objective[sp.objective], n_warm, bounds, s)
        res = run(prob, config, seed=s, workers=workers, warm_start=warm)
        x = res.x if math.isfinite(res.f) else None
        if x is not None:
            last_by_objective[sp.objective] = x
        bests.append(x)
        evals.append(res.evaluations)
        seeds.append(s)
        log.info("%s: f=%.6g feasible=%s evaluations=%d", sp.label, res.f, res.feasible, res.evaluations)

    points = []
    for k, (sp, prob) in enumerate(zip(schedule.problems, problems)):
        cands = [k] + ([j for j, q in enumerate(schedule.problems) if q.objective == sp.objective and j != k] if share_incumbents else [])
        chosen, chosen_val, chosen_ok = None, math.inf, False
        for j in cands:
            if bests[j] is None:
                continue
            try:
                props = evaluator(RveParams.from_sequence(bests[j]), count=False)
            except StarLatticeError:
                continue
            g = [c.from_props(props) for c in prob.constraints]
            ok = all(v <= config.constraint_tol for v in g)
            val = prob.objective.from_props(props)
            if j == k and chosen is None:
                chosen, chosen_val, chosen_ok = j, val, ok
            elif ok and (not chosen_ok or val < chosen_val):
                chosen, chosen_val, chosen_ok = j, val, ok
        if chosen is not None and chosen != k:
            log.info("%s: adopting incumbent from %s", sp.label, schedule.problems[chosen].label)
        points.append(_make_point(sp.label, bests[chosen] if chosen is not None else None, evals[k], chosen_ok, seeds[k], evaluator))
        if progress:
            progress(k, len(schedule), points[-1])
    return points


def _make_point(label, x, evaluations, feasible, seed, evaluator) -> EnvelopePoint:
    if x is None:
        nan = math.nan
        return EnvelopePoint(label, nan, nan, nan, nan, nan, nan, evaluations, False, seed)
    params = RveParams.from_sequence(x)
    props = evaluator(params, count=False)
    return EnvelopePoint(label, params.h1, params.h2, params.theta, params.t, props.nu, props.ncte, evaluations, bool(feasible), seed)


def summarize(points) -> dict:
    ok = [p for p in points if p.feasible]
    if not ok:
        return {"feasible": 0, "total": len(points)}
    nus = [p.nu for p in ok]
    nc = [p.ncte for p in ok]
    return {
        "feasible": len(ok),
        "total": len(points),
        "nu_min": min(nus),
        "nu_max": max(nus),
        "ncte_min": min(nc),
        "ncte_max": max(nc),
        "evaluations": sum(p.evaluations for p in points),
    }


def _implies(tight: str, loose: str) -> bool:
    a, b = parse_constraint(tight), parse_constraint(loose)
    if (a.quantity, a.op) != (b.quantity, b.op):
        return False
    return a.threshold >= b.threshold if a.op == ">=" else a.threshold <= b.threshold


def _nested(inner: ScheduledProblem, outer: ScheduledProblem) -> bool:
    """True when every design feasible for ``inner`` is feasible for ``outer``."""
    return all(any(_implies(c, d) for c in inner.constraints) for d in outer.constraints)


def monotonicity_violations(schedule: EnvelopeSchedule, points, tol: float = 1e-4) -> list[str]:
    """Pairs of same-objective problems where relaxing constraints made the optimum worse."""
    by_label = {p.label: p for p in points}
    bad = []
    probs = [sp for sp in schedule.problems if sp.label in by_label and by_label[sp.label].feasible]
    for a in probs:
        for b in probs:
            if a is b or a.objective != b.objective or not _nested(a, b):
                continue
            obj = DesignObjective(a.objective)
            fa, fb = obj.from_props(by_label[a.label]), obj.from_props(by_label[b.label])
            if fb > fa + tol:
                bad.append(f"{b.label} ({fb:.6g}) is worse than the tighter {a.label} ({fa:.6g})")
    return bad


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.16e}" if math.isfinite(v) else repr(v)
    return str(v)


def points_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow([_fmt(getattr(p, k)) for k in CSV_HEADER])
    return buf.getvalue()


def points_to_json(points) -> str:
    rows = []
    for p in points:
        d = asdict(p)
        for k, v in d.items():
            if isinstance(v, float) and not math.isfinite(v):
                d[k] = None
        rows.append(d)
    return json.dumps({"points": rows}, indent=2) + "\n"


def _coerce(name: str, raw):
    kinds = {f.name: f.type for f in fields(EnvelopePoint)}
    kind = kinds[name]
    if kind == "str":
        return str(raw)
    if kind == "bool":
        if isinstance(raw, bool):
            return raw
        return str(raw).strip().lower() == "true"
    if kind == "int":
        return int(raw)
    return math.nan if raw is None or raw == "" else float(raw)


def points_from_csv(text: str) -> list[EnvelopePoint]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader, ()))
    if header != CSV_HEADER:
        raise ConfigError(f"unexpected envelope CSV header: {','.join(header)}")
    return [EnvelopePoint(**{k: _coerce(k, v) for k, v in zip(CSV_HEADER, row)}) for row in reader if row]


def points_from_json(text: str) -> list[EnvelopePoint]:
    data = json.loads(text)
    return [EnvelopePoint(**{k: _coerce(k, d.get(k)) for k in CSV_HEADER}) for d in data["points"]]


def export(points, fmt: str, path) -> Path:
    path = Path(path)
    if fmt == "csv":
        path.write_text(points_to_csv(points))
    elif fmt == "json":
        path.write_text(points_to_json(points))
    else:
        raise ConfigError(f"unknown export format {fmt!r}")
    return path


def load_points(path) -> list[EnvelopePoint]:
    path = Path(path)
    text = path.read_text()
    return points_from_json(text) if path.suffix.lower() == ".json" else points_from_csv(text)
