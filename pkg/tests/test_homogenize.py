import math

from hypothesis import given, settings, strategies as st
import pytest

from starlattice.errors import GeometryError, SolverError
from starlattice.geometry import BOUNDS, RveParams, build_rve
from starlattice.homogenize import (
    EvaluationSettings,
    Evaluator,
    cte,
    cte_from_extension,
    evaluate_design,
    ncte,
    poisson_from_extensions,
    poissons_ratio,
    thermal_solution,
)
from starlattice.materials import ALUMINIUM, DEFAULT_MATERIALS, INVAR, MaterialTable
from starlattice.mesh import mesh_rve

from conftest import MIN_NCTE, MIN_NU, REFERENCE_DESIGNS

box = st.tuples(*[st.floats(b.lo, b.hi) for b in BOUNDS]).map(RveParams.from_sequence)


def _mesh(params, **kw):
    return mesh_rve(build_rve(params), **kw)


def test_ncte_examples():
    assert ncte(23e-6) == 1.0
    assert ncte(0.0) == 0.0
    assert ncte(-4.6e-9) == pytest.approx(-0.0002)


def test_poisson_arithmetic():
    assert poisson_from_extensions(0.1, 0.02) == pytest.approx(-0.2)


def test_poisson_division_guard():
    with pytest.raises(SolverError):
        poisson_from_extensions(1e-16, 1.0)


def test_cte_arithmetic():
    assert cte_from_extension(0.414, 100.0, 180.0) == pytest.approx(2.3e-5)


@settings(max_examples=15, deadline=None)
@given(box)
def test_normalisation_exact(params):
    p = evaluate_design(params)
    assert p.ncte * 23e-6 == pytest.approx(p.alpha, rel=1e-15, abs=0)


@settings(max_examples=15, deadline=None)
@given(box)
def test_thermal_square_symmetry(params):
    sol = thermal_solution(_mesh(params))
    assert abs(sol.dx - sol.dy) <= 1e-6 * abs(sol.dx)


@pytest.mark.parametrize("material, expected", [(INVAR, 2.5e-6), (ALUMINIUM, 24.3e-6)])
@settings(max_examples=8, deadline=None)
@given(params=box)
def test_single_material_recovers_constituent(material, expected, params):
    s = EvaluationSettings(materials=MaterialTable().uniform(material))
    assert cte(_mesh(params), s) == pytest.approx(expected, rel=1e-6)


def test_all_aluminium_poisson_finite():
    p = evaluate_design(MIN_NU, EvaluationSettings(materials=MaterialTable().uniform(ALUMINIUM)))
    assert math.isfinite(p.nu)
    assert p.alpha == pytest.approx(24.3e-6, rel=1e-6)


@pytest.mark.parametrize("params", [MIN_NU, MIN_NCTE])
def test_strain_magnitude_invariance(params):
    mesh = _mesh(params)
    nus = [poissons_ratio(mesh, strain=e) for e in (1e-4, 1e-3, 1e-2)]
    assert max(nus) - min(nus) <= 1e-9 * abs(nus[1])


@settings(max_examples=10, deadline=None)
@given(box, st.floats(0.05, 20.0))
def test_scale_invariance(params, s):
    a = evaluate_design(params)
    b = evaluate_design(RveParams(params.h1 * s, params.h2 * s, params.theta, params.t * s))
    assert b.nu == pytest.approx(a.nu, rel=1e-9, abs=1e-12)
    assert b.alpha == pytest.approx(a.alpha, rel=1e-9, abs=1e-18)


@pytest.mark.parametrize("factor", [10.0, 0.1])
@pytest.mark.parametrize("label", list(REFERENCE_DESIGNS))
def test_weak_material_insensitivity(factor, label):
    params = REFERENCE_DESIGNS[label][0]
    a = evaluate_design(params)
    b = evaluate_design(params, EvaluationSettings(materials=DEFAULT_MATERIALS.with_weak_scaled(factor)))
    assert abs(b.nu - a.nu) < 1e-3 * abs(a.nu)
    assert abs(b.alpha - a.alpha) < 1e-3 * abs(a.alpha)


@pytest.mark.parametrize("label", ["PR MIN", "NCTE MIN", "NEAR-ZERO ALPSO", "NEAR-ZERO ALHSO"])
def test_mesh_convergence(label):
    params = REFERENCE_DESIGNS[label][0]
    a = Evaluator()(params)
    b = Evaluator(EvaluationSettings(seed_factor=0.0425))(params)
    assert b.diagnostics["elements"] > a.diagnostics["elements"]
    assert abs(b.nu - a.nu) < 1e-2 * abs(a.nu)
    assert abs(b.alpha - a.alpha) < 1e-2 * abs(a.alpha)


def test_min_nu_design_is_auxetic():
    p = evaluate_design(MIN_NU)
    assert p.nu < -0.15
    assert p.diagnostics["elements"] >= 100


def test_determinism_bit_identical():
    a = Evaluator()(MIN_NU)
    b = Evaluator()(MIN_NU)
    assert (a.nu, a.alpha, a.ncte) == (b.nu, b.alpha, b.ncte)


def test_diagnostics_report_solver_quality():
    d = evaluate_design(MIN_NU).diagnostics
    assert d["residual_mechanical"] <= 1e-8 and d["residual_thermal"] <= 1e-8
    assert d["edge_length"] == pytest.approx(235.19, abs=0.01)


def test_memo_counts_calls_and_misses():
    ev = Evaluator()
    first = ev(MIN_NU)
    assert ev(RveParams(*MIN_NU.as_tuple())) is first
    ev(MIN_NU, count=False)
    assert (ev.calls, ev.misses) == (2, 1)
    ev.reset_counters()
    assert (ev.calls, ev.misses) == (0, 0)
    ev(MIN_NU)
    assert ev.misses == 0


def test_memo_distinguishes_last_bit():
    ev = Evaluator()
    ev(MIN_NU)
    ev(RveParams(math.nextafter(MIN_NU.h1, 0.0), MIN_NU.h2, MIN_NU.theta, MIN_NU.t))
    assert ev.misses == 2


def test_errors_are_cached_and_reraised():
    ev = Evaluator()
    bad = RveParams(10.0, 0.0, 20.0, 1.0)
    for _ in range(2):
        with pytest.raises(GeometryError):
            ev(bad)
    assert ev.misses == 1
