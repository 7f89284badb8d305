import math

from hypothesis import given, settings, strategies as st
import pytest

from starlattice.errors import GeometryError
from starlattice.geometry import (
    BOUNDS,
    TIP_ROD_STAR,
    RveParams,
    build_rve,
    rve_edge_length,
    validate_params,
)
from starlattice.mesh import mesh_rve

box = st.builds(
    RveParams,
    st.floats(5, 100),
    st.floats(5, 100),
    st.floats(5, 40),
    st.floats(0.5, 5),
)


def test_edge_length_examples():
    assert rve_edge_length(RveParams(100, 13.34, 23.85, 0.5)) == pytest.approx(235.19, abs=0.01)
    assert rve_edge_length(RveParams(5, 100, 40, 5)) == pytest.approx(291.77, abs=0.01)
    assert rve_edge_length(RveParams(10, 10, 45, 1)) == pytest.approx(48.284, abs=1e-3)
    assert rve_edge_length(RveParams(30, 0.0, 17, 1)) == 60.0


def test_edge_length_rejects_non_finite():
    with pytest.raises(GeometryError):
        rve_edge_length(RveParams(math.inf, 1, 10, 1))


def test_default_cell_member_inventory():
    model = build_rve(RveParams(100, 13.34, 23.85, 0.5))
    roles = [m.role for m in model.members]
    mats = [m.material for m in model.members]
    assert len(model.members) == 24
    assert roles.count("chevron") == 8 and roles.count("tie") == 8
    assert roles.count("rod") == 4 and roles.count("corner") == 4
    assert mats.count("invar") == 16 and mats.count("aluminium") == 4 and mats.count("weak") == 4
    assert model.edge_length == pytest.approx(235.19, abs=0.01)


def test_tip_rod_cell_member_inventory():
    model = build_rve(RveParams(100, 13.34, 23.85, 0.5), TIP_ROD_STAR)
    mats = [m.material for m in model.members]
    assert len(model.members) == 16
    assert (mats.count("invar"), mats.count("aluminium"), mats.count("weak")) == (8, 4, 4)
    rods = [model.member_length(m) for m in model.members if m.role == "rod"]
    assert rods == pytest.approx([100.0] * 4)


def test_chevron_legs_have_length_h2_and_tilt_theta():
    p = RveParams(60, 20, 30, 1)
    model = build_rve(p)
    for m in model.members:
        if m.role == "chevron":
            assert model.member_length(m) == pytest.approx(20.0, rel=1e-12)
            (xa, ya), (xb, yb) = model.nodes[m.a], model.nodes[m.b]
            along, across = (abs(xb - xa), abs(yb - ya)) if ya == 0 else (abs(yb - ya), abs(xb - xa))
            assert math.degrees(math.atan2(along, across)) == pytest.approx(30.0)


@pytest.mark.parametrize("template", ["dart-star", "tip-rod-star"])
def test_vanishing_h2_is_degenerate(template):
    with pytest.raises(GeometryError, match="degenerate|coincide"):
        build_rve(RveParams(50, 1e-12, 20, 1), template)


@pytest.mark.parametrize("bad", [(-1, 10, 10, 1), (10, 10, 10, 0), (10, math.nan, 10, 1)])
def test_non_positive_or_non_finite_rejected(bad):
    with pytest.raises(GeometryError):
        build_rve(RveParams(*bad))


def test_validate_params_examples():
    assert validate_params(RveParams(100, 13.34, 23.85, 0.5)) == []
    (v,) = validate_params(RveParams(4.9, 50, 20, 1))
    assert (v.name, v.bound, v.limit) == ("h1", "lower", 5.0)
    (v,) = validate_params(RveParams(50, 50, 41, 1))
    assert (v.name, v.bound, v.limit) == ("theta", "upper", 40.0)
    assert "theta <= 40" in str(v)


def test_bounds_are_inclusive():
    assert validate_params(RveParams(*(b.lo for b in BOUNDS))) == []
    assert validate_params(RveParams(*(b.hi for b in BOUNDS))) == []


def _node_set(model):
    return {(round(x / model.edge_length, 9), round(y / model.edge_length, 9)) for x, y in model.nodes}


def _member_set(model, transform):
    out = set()
    for m in model.members:
        ends = []
        for i in (m.a, m.b):
            x, y = transform(*model.nodes[i])
            ends.append((round(x / model.edge_length, 9) + 0.0, round(y / model.edge_length, 9) + 0.0))
        out.add((frozenset(ends), m.material))
    return out


@settings(max_examples=60, deadline=None)
@given(box)
def test_square_symmetry(p):
    model = build_rve(p)
    ident = _member_set(model, lambda x, y: (x, y))
    for tf in (lambda x, y: (-x, y), lambda x, y: (x, -y), lambda x, y: (-y, x)):
        assert _member_set(model, tf) == ident
    nodes = _node_set(model)
    assert {(-x + 0.0, y) for x, y in nodes} == nodes


@settings(max_examples=60, deadline=None)
@given(box, st.floats(0.01, 50))
def test_edge_length_monotone_and_independent_of_t(p, dh):
    L = rve_edge_length(p)
    assert rve_edge_length(RveParams(p.h1 + dh, p.h2, p.theta, p.t)) > L
    assert rve_edge_length(RveParams(p.h1, p.h2 + dh, p.theta, p.t)) > L
    assert rve_edge_length(RveParams(p.h1, p.h2, p.theta, p.t + dh)) == L


@settings(max_examples=60, deadline=None)
@given(box)
def test_cell_invariants_over_box(p):
    model = build_rve(p)
    b = model.boundary_sets
    assert all(b[k] for k in ("left", "right", "top", "bottom", "corners"))
    assert len(b["left"]) == len(b["right"]) and len(b["top"]) == len(b["bottom"])
    corners = set(b["corners"])
    weak = [m for m in model.members if m.material == "weak"]
    assert len(weak) == 4
    for m in weak:
        assert len({m.a, m.b} & corners) == 1
    assert all(model.member_length(m) > 1e-9 * model.edge_length for m in model.members)


def test_geometry_document_resolves_coordinates():
    doc = build_rve(RveParams(100, 13.34, 23.85, 0.5)).to_document()
    names = {n["name"] for n in doc["nodes"]}
    assert {"M_E", "C_NE", "P_N", "D_SW"} <= names
    assert {m["material"] for m in doc["members"]} == {"invar", "aluminium", "weak"}
    me = next(n for n in doc["nodes"] if n["name"] == "M_E")
    assert me["x"] == pytest.approx(doc["edge_length"] / 2)


def test_unknown_template_rejected():
    with pytest.raises(GeometryError):
        build_rve(RveParams(10, 10, 10, 1), "hexagon")


@settings(max_examples=40, deadline=None)
@given(box)
def test_element_count_band_over_box(p):
    # the smallest count over the box is 96 (small theta), see README
    assert 96 <= mesh_rve(build_rve(p)).n_elements <= 400
