"""Parametric star-lattice unit cell.

A cell is produced from a :class:`LatticeTemplate`, which resolves named node
positions from the four design variables and lists the members joining them.
Everything downstream (meshing, assembly, periodic constraints) only sees the
resulting :class:`RveModel`, so templates can be swapped freely.

Node naming: ``<kind>_<dir>`` where dir is an axis direction (E, N, W, S) or a
diagonal (NE, NW, SW, SE). ``M_*`` are mid-edge boundary nodes and ``C_*`` the
cell corners.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable, Mapping

from .errors import GeometryError

AXES = ("E", "N", "W", "S")
DIAGONALS = ("NE", "NW", "SW", "SE")
_AXIS_VEC = {"E": (1, 0), "N": (0, 1), "W": (-1, 0), "S": (0, -1)}
_DIAG_VEC = {"NE": (1, 1), "NW": (-1, 1), "SW": (-1, -1), "SE": (1, -1)}
_ADJACENT = {"E": ("NE", "SE"), "N": ("NE", "NW"), "W": ("NW", "SW"), "S": ("SW", "SE")}

DEGENERATE_FRACTION = 1e-9


@dataclass(frozen=True)
class RveParams:
    h1: float
    h2: float
    theta: float  # degrees
    t: float

    def __post_init__(self):
        for name in ("h1", "h2", "theta", "t"):
            try:
                object.__setattr__(self, name, float(getattr(self, name)))
            except (TypeError, ValueError):
                raise GeometryError(f"{name} must be a number, got {getattr(self, name)!r}") from None

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.h1, self.h2, self.theta, self.t)

    @classmethod
    def from_sequence(cls, values) -> "RveParams":
        h1, h2, theta, t = (float(v) for v in values)
        return cls(h1, h2, theta, t)

    def scaled(self, s: float) -> "RveParams":
        """Lengths scaled by ``s``; the angle is unchanged."""
        return RveParams(self.h1 * s, self.h2 * s, self.theta, self.t * s)


@dataclass(frozen=True)
class Bound:
    name: str
    lo: float
    hi: float


BOUNDS: tuple[Bound, ...] = (
    Bound("h1", 5.0, 100.0),
    Bound("h2", 5.0, 100.0),
    Bound("theta", 5.0, 40.0),
    Bound("t", 0.5, 5.0),
)


@dataclass(frozen=True)
class Violation:
    name: str
    value: float
    bound: str  # "lower" or "upper"
    limit: float

    def __str__(self) -> str:
        op = ">=" if self.bound == "lower" else "<="
        return f"{self.name}={self.value:g} violates {self.bound} bound ({self.name} {op} {self.limit:g})"


def validate_params(params: RveParams, bounds: tuple[Bound, ...] = BOUNDS) -> list[Violation]:
    """Inclusive box check; an empty list means the design is inside the box."""
    out = []
    for b in bounds:
        v = getattr(params, b.name)
        if not math.isfinite(v) or v < b.lo:
            out.append(Violation(b.name, v, "lower", b.lo))
        elif v > b.hi:
            out.append(Violation(b.name, v, "upper", b.hi))
    return out


def check_finite_positive(params: RveParams) -> None:
    for name in ("h1", "h2", "theta", "t"):
        v = getattr(params, name)
        if not math.isfinite(v):
            raise GeometryError(f"{name} must be finite, got {v}")
        if v <= 0.0:
            raise GeometryError(f"{name} must be > 0, got {v:g}")


def rve_edge_length(params: RveParams) -> float:
    for name in ("h1", "h2", "theta"):
        if not math.isfinite(getattr(params, name)):
            raise GeometryError(f"{name} must be finite")
    th = math.radians(params.theta)
    return 2.0 * (params.h1 + params.h2 * (math.sin(th) + math.cos(th)))


@dataclass(frozen=True)
class MemberRule:
    a: str
    b: str
    material: str
    role: str


@dataclass(frozen=True)
class Member:
    a: int
    b: int
    material: str
    thickness: float
    role: str


@dataclass(frozen=True)
class LatticeTemplate:
    """Node placement rule plus member list for one family of unit cells."""

    name: str
    place_nodes: Callable[[RveParams], dict[str, tuple[float, float]]]
    members: tuple[MemberRule, ...]
    boundary: Mapping[str, tuple[str, ...]] = field(
        default_factory=lambda: {
            "left": ("M_W",),
            "right": ("M_E",),
            "bottom": ("M_S",),
            "top": ("M_N",),
            "corners": ("C_SW", "C_SE", "C_NE", "C_NW"),
        }
    )


def _axis_nodes(kind: str, r: float) -> dict[str, tuple[float, float]]:
    return {f"{kind}_{a}": (r * v[0], r * v[1]) for a, v in _AXIS_VEC.items()}


def _diag_nodes(kind: str, d: float) -> dict[str, tuple[float, float]]:
    return {f"{kind}_{q}": (d * v[0], d * v[1]) for q, v in _DIAG_VEC.items()}


def _axis_axis(k1, k2, material, role):
    return tuple(MemberRule(f"{k1}_{a}", f"{k2}_{a}", material, role) for a in AXES)


def _axis_diag(k_axis, k_diag, material, role):
    return tuple(
        MemberRule(f"{k_axis}_{a}", f"{k_diag}_{q}", material, role) for a in AXES for q in _ADJACENT[a]
    )


def _diag_diag(k1, k2, material, role):
    return tuple(MemberRule(f"{k1}_{q}", f"{k2}_{q}", material, role) for q in DIAGONALS)


def _dart_nodes(p: RveParams) -> dict[str, tuple[float, float]]:
    th = math.radians(p.theta)
    s, c = math.sin(th), math.cos(th)
    half = 0.5 * rve_edge_length(p)
    nodes = {}
    nodes.update(_axis_nodes("P", p.h2 * (c - s)))
    nodes.update(_diag_nodes("D", p.h2 * c))
    nodes.update(_axis_nodes("M", half))
    nodes.update(_diag_nodes("C", half))
    return nodes


# Invar chevrons point into the cell and are pulled outwards by Aluminium rods;
# Invar ties close each chevron vertex back onto the two neighbouring mid-edge
# nodes, so every bi-material loop passes through the periodic boundary.
DART_STAR = LatticeTemplate(
    name="dart-star",
    place_nodes=_dart_nodes,
    members=(
        *_axis_diag("P", "D", "invar", "chevron"),
        *_axis_axis("P", "M", "aluminium", "rod"),
        *_axis_diag("M", "D", "invar", "tie"),
        *_diag_diag("D", "C", "weak", "corner"),
    ),
)


def _tip_rod_nodes(p: RveParams) -> dict[str, tuple[float, float]]:
    th = math.radians(p.theta)
    s, c = math.sin(th), math.cos(th)
    half = 0.5 * rve_edge_length(p)
    nodes = {}
    nodes.update(_axis_nodes("P", p.h2 * (s + c)))
    nodes.update(_diag_nodes("D", p.h2 * s))
    nodes.update(_axis_nodes("M", half))
    nodes.update(_diag_nodes("C", half))
    return nodes


# Star tips on the axes, each carried to the boundary by a single rod of
# length h1; only the weak beams reach the corners.
TIP_ROD_STAR = LatticeTemplate(
    name="tip-rod-star",
    place_nodes=_tip_rod_nodes,
    members=(
        *_axis_diag("P", "D", "invar", "leg"),
        *_axis_axis("P", "M", "aluminium", "rod"),
        *_diag_diag("D", "C", "weak", "corner"),
    ),
)

TEMPLATES = {t.name: t for t in (DART_STAR, TIP_ROD_STAR)}
DEFAULT_TEMPLATE = DART_STAR


@dataclass(frozen=True)
class RveModel:
    params: RveParams
    template: str
    node_names: tuple[str, ...]
    nodes: tuple[tuple[float, float], ...]
    members: tuple[Member, ...]
    edge_length: float
    boundary_sets: Mapping[str, tuple[int, ...]]
    center: tuple[float, float] = (0.0, 0.0)

    def node_index(self, name: str) -> int:
        return self.node_names.index(name)

    def member_length(self, m: Member) -> float:
        (xa, ya), (xb, yb) = self.nodes[m.a], self.nodes[m.b]
        return math.hypot(xb - xa, yb - ya)

    def to_document(self) -> dict:
        """Plain-data view with resolved coordinates, for debugging dumps."""
        return {
            "template": self.template,
            "params": {"h1": self.params.h1, "h2": self.params.h2, "theta_deg": self.params.theta, "t": self.params.t},
            "edge_length": self.edge_length,
            "nodes": [
                {"id": i, "name": n, "x": x, "y": y} for i, (n, (x, y)) in enumerate(zip(self.node_names, self.nodes))
            ],
            "members": [
                {
                    "a": self.node_names[m.a],
                    "b": self.node_names[m.b],
                    "material": m.material,
                    "thickness": m.thickness,
                    "role": m.role,
                    "length": self.member_length(m),
                }
                for m in self.members
            ],
            "boundary_sets": {k: [self.node_names[i] for i in v] for k, v in self.boundary_sets.items()},
        }


def build_rve(params: RveParams, template: LatticeTemplate | str = DEFAULT_TEMPLATE) -> RveModel:
    check_finite_positive(params)
    if isinstance(template, str):
        try:
            template = TEMPLATES[template]
        except KeyError:
            raise GeometryError(f"unknown lattice template {template!r}") from None
    L = rve_edge_length(params)
    placed = template.place_nodes(params)
    names = tuple(placed)
    index = {n: i for i, n in enumerate(names)}
    coords = tuple((float(x), float(y)) for x, y in placed.values())
    tol = DEGENERATE_FRACTION * L

    members = []
    for rule in template.members:
        try:
            a, b = index[rule.a], index[rule.b]
        except KeyError as exc:
            raise GeometryError(f"template {template.name!r} references unknown node {exc.args[0]}") from None
        (xa, ya), (xb, yb) = coords[a], coords[b]
        if math.hypot(xb - xa, yb - ya) < tol:
            raise GeometryError(
                f"degenerate {rule.role} member {rule.a}-{rule.b}: length below {DEGENERATE_FRACTION:g}*L"
            )
        members.append(Member(a, b, rule.material, params.t, rule.role))

    used = {i for m in members for i in (m.a, m.b)}
    for i, n in enumerate(names):
        if i not in used:
            raise GeometryError(f"node {n} is not attached to any member")
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            if math.dist(coords[i], coords[j]) < tol:
                raise GeometryError(f"nodes {names[i]} and {names[j]} coincide")

    boundary = {k: tuple(index[n] for n in v) for k, v in template.boundary.items()}
    model = RveModel(params, template.name, names, coords, tuple(members), L, boundary)
    _check_connected(model)
    return model


def _check_connected(model: RveModel) -> None:
    adj = {i: set() for i in range(len(model.nodes))}
    for m in model.members:
        adj[m.a].add(m.b)
        adj[m.b].add(m.a)
    seen, stack = {0}, [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != len(model.nodes):
        missing = sorted(model.node_names[i] for i in set(adj) - seen)
        raise GeometryError(f"member graph is disconnected; unreachable nodes: {', '.join(missing)}")
