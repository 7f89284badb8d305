import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from starlattice.errors import ConfigError
from starlattice.geometry import BOUNDS, RveParams
from starlattice.homogenize import EvaluationSettings, get_evaluator
from starlattice.optimize import (
    OptConfig,
    OptimizationProblem,
    alhso_minimize,
    alpso_minimize,
    augmented_lagrangian,
    compare_optimizers,
    design_problem,
    parse_constraint,
    report_csv,
)
from starlattice.optimize.core import stalled
from starlattice.validation import ROSENBROCK, SPHERE

OPTIMIZERS = {"alpso": alpso_minimize, "alhso": alhso_minimize}


def test_lagrangian_without_constraints():
    assert augmented_lagrangian(1.0, [], [], []) == 1.0


def test_lagrangian_pure_penalty():
    assert augmented_lagrangian(0.0, [1.0], [0.0], [1.0]) == 1.0


def test_lagrangian_active_multiplier():
    assert augmented_lagrangian(0.0, [-1.0], [2.0], [1.0]) == -1.0


def test_lagrangian_rejects_bad_shapes():
    with pytest.raises(ValueError):
        augmented_lagrangian(0.0, [1.0], [0.0, 0.0], [1.0])
    with pytest.raises(ValueError):
        augmented_lagrangian(0.0, [1.0], [0.0], [0.0])


@given(st.floats(-1e6, 1e6), st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=4), st.floats(1e-3, 1e3))
def test_lagrangian_dominates_objective_when_violated(f, g, r):
    # with zero multipliers the augmented term is a pure penalty
    g = np.array(g)
    val = augmented_lagrangian(f, g, np.zeros_like(g), np.full_like(g, r))
    assert val == pytest.approx(f + r * np.sum(np.maximum(g, 0.0) ** 2))


@pytest.mark.parametrize("name", OPTIMIZERS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_constrained_sphere(name, seed):
    r = OPTIMIZERS[name](SPHERE, OptConfig(max_evaluations=5000), seed=seed)
    assert r.feasible
    assert r.f == pytest.approx(0.5, abs=1e-3)
    assert np.allclose(r.x, 0.5, atol=1e-2)
    assert r.evaluations <= 5000


@pytest.mark.parametrize("seed", [0, 1])
def test_rosenbrock(seed):
    r = alpso_minimize(ROSENBROCK, OptConfig(max_evaluations=5000), seed=seed)
    assert r.f <= 1e-4
    assert np.allclose(r.x, 1.0, atol=0.05)


@pytest.mark.parametrize("name", OPTIMIZERS)
def test_repeatable_per_seed(name):
    cfg = OptConfig(max_evaluations=1500)
    a = OPTIMIZERS[name](SPHERE, cfg, seed=5)
    b = OPTIMIZERS[name](SPHERE, cfg, seed=5)
    c = OPTIMIZERS[name](SPHERE, cfg, seed=6)
    assert a.same_as(b)
    assert not a.same_as(c)


@pytest.mark.parametrize("name", OPTIMIZERS)
def test_worker_count_independent(name):
    cfg = OptConfig(max_evaluations=600)
    a = OPTIMIZERS[name](SPHERE, cfg, seed=3, workers=1)
    b = OPTIMIZERS[name](SPHERE, cfg, seed=3, workers=2)
    assert a.same_as(b)


class Recorder:
    def __init__(self, fn):
        self.fn = fn
        self.seen = []

    def __call__(self, x):
        self.seen.append(np.array(x, dtype=float))
        return self.fn(x)


@pytest.mark.parametrize("name", OPTIMIZERS)
def test_box_respected(name):
    rec = Recorder(lambda x: float(np.sum((x - 7.0) ** 2)))
    prob = OptimizationProblem(rec, (), ((-1.0, 2.0), (0.0, 0.5)))
    r = OPTIMIZERS[name](prob, OptConfig(max_evaluations=800), seed=0)
    pts = np.array(rec.seen)
    assert np.all(pts >= prob.lower) and np.all(pts <= prob.upper)
    assert np.allclose(r.x, [2.0, 0.5], atol=0.05)


@pytest.mark.parametrize("name", OPTIMIZERS)
def test_best_is_monotone_and_bounds_history(name):
    rec = Recorder(SPHERE.objective)
    prob = OptimizationProblem(rec, SPHERE.constraints, SPHERE.bounds)
    r = OPTIMIZERS[name](prob, OptConfig(max_evaluations=2000), seed=1)
    best = [h["best_objective"] for h in r.history if h["best_objective"] is not None]
    assert best and all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
    feasible_fs = [SPHERE.objective(x) for x in rec.seen if SPHERE.constraints[0](x) <= 1e-4]
    assert r.f <= min(feasible_fs)
    assert r.evaluations == len(rec.seen)


@pytest.mark.parametrize("name", OPTIMIZERS)
def test_infeasible_problem_flagged(name):
    prob = OptimizationProblem(lambda x: float(x[0]), (lambda x: 2.0 - x[0],), ((0.0, 1.0),))
    r = OPTIMIZERS[name](prob, OptConfig(max_evaluations=300), seed=0)
    assert not r.feasible
    assert r.x[0] == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("name", OPTIMIZERS)
def test_errored_designs_are_penalised_not_raised(name):
    def fragile(x):
        if x[0] < 0.0:
            raise RuntimeError("bad sample")
        return float((x[0] - 0.3) ** 2)

    prob = OptimizationProblem(fragile, (), ((-1.0, 1.0),))
    r = OPTIMIZERS[name](prob, OptConfig(max_evaluations=600), seed=0)
    assert r.x[0] == pytest.approx(0.3, abs=1e-2)


def test_budget_is_respected():
    for name, run in OPTIMIZERS.items():
        r = run(ROSENBROCK, OptConfig(max_evaluations=333, stall_tol=1e-15), seed=0)
        assert r.evaluations <= 333, name


def test_stall_rule_needs_feasible_flat_run():
    assert stalled([5.0, 1.0, 1.0, 1.0, 1.0], [True] * 5, 1e-4, 3)
    assert not stalled([5.0, 1.0, 1.0, 1.0, 1.0], [True, True, True, False, True], 1e-4, 3)
    assert not stalled([1.0, 1.0, 1.0], [True] * 3, 1e-4, 3)
    assert not stalled([1.0, 0.5, 0.5, 0.5], [True] * 4, 1e-4, 3)


@pytest.mark.parametrize(
    "kw",
    [{"swarm_size": 0}, {"swarm_size": 2.5}, {"constraint_tol": -1.0}, {"pitch_rate": 1.5}, {"seed": -1},
     {"inertia_start": 0.3, "inertia_end": 0.5}, {"stall_tol": math.nan}],
)
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        OptConfig(**kw)


def test_config_round_trip():
    c = OptConfig(swarm_size=12, seed=4)
    assert OptConfig.from_dict(c.to_dict()) == c
    with pytest.raises(ConfigError, match="bogus"):
        OptConfig.from_dict({"bogus": 1})


def test_problem_rejects_bad_bounds():
    with pytest.raises(ConfigError):
        OptimizationProblem(lambda x: 0.0, (), ((1.0, 1.0),))


@pytest.mark.parametrize(
    "text, quantity, op, value",
    [("ncte>=-0.1", "ncte", ">=", -0.1), ("PR <= 0", "nu", "<=", 0.0), ("nu>=1e-2", "nu", ">=", 0.01)],
)
def test_parse_constraint(text, quantity, op, value):
    c = parse_constraint(text)
    assert (c.quantity, c.op, c.threshold) == (quantity, op, value)


@pytest.mark.parametrize("text", ["ncte > 0", "cte>=0", "ncte>=abc", ""])
def test_parse_constraint_rejects(text):
    with pytest.raises(ConfigError):
        parse_constraint(text)


def test_constraint_sign_convention():
    from starlattice.homogenize import HomogenizedProps

    p = HomogenizedProps(nu=-0.2, alpha=0.0, ncte=0.1)
    assert parse_constraint("ncte>=0.05").from_props(p) < 0
    assert parse_constraint("ncte<=0.05").from_props(p) > 0
    assert parse_constraint("pr>=-0.1").from_props(p) == pytest.approx(0.1)


def test_unknown_objective():
    with pytest.raises(ConfigError):
        design_problem("min-stiffness")


def test_design_problem_decodes_and_stays_in_box():
    r = alpso_minimize(design_problem("min-pr"), OptConfig(swarm_size=8, max_evaluations=80), seed=0)
    assert isinstance(r.design, RveParams)
    for v, b in zip(r.design.as_tuple(), BOUNDS):
        assert b.lo <= v <= b.hi


def test_constraint_calls_are_not_counted():
    s = EvaluationSettings(seed_factor=0.0851)
    ev = get_evaluator(s)
    ev.clear()
    r = alpso_minimize(design_problem("min-pr", ["ncte>=0"], s), OptConfig(swarm_size=8, max_evaluations=80), seed=0)
    assert ev.calls == r.evaluations


def test_compare_report_shape_and_bookkeeping():
    s = EvaluationSettings(seed_factor=0.0852)
    rows = compare_optimizers(seeds=(0,), config=OptConfig(swarm_size=6, memory_size=6, max_evaluations=36), settings=s)
    assert [(r["objective"], r["optimizer"]) for r in rows] == [
        (o, n) for o in ("min-pr", "min-ncte", "near-zero-ncte") for n in ("alpso", "alhso")
    ]
    assert all(r["objective_calls"] == r["evaluations"] for r in rows)
    for r in rows:
        assert r["cte"] == pytest.approx(r["ncte"] * 23e-6)
    text = report_csv(rows)
    assert text.splitlines()[0].startswith("objective,optimizer,seed,h1,h2,theta_deg,t,evaluations")
    assert len(text.splitlines()) == 7
