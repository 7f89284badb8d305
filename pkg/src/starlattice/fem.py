"""Linear 2D Timoshenko frame solver with periodic multi-point constraints.

Degrees of freedom are numbered ``3*node + (0: ux, 1: uy, 2: theta_z)``. The
periodic relations also involve two macro extensions, the cell stretch along
x and y, which are appended after the nodal DOFs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from . import kernels
from ._assembly_py import element_matrices
from .errors import MeshError, SolverError
from .materials import MaterialTable, DEFAULT_MATERIALS
from .mesh import Mesh


@dataclass(frozen=True)
class ElementState:
    length: float
    angle: float  # radians, measured from +x
    E: float
    alpha: float
    nu: float
    area: float
    inertia: float
    kappa: float

    def __post_init__(self):
        for name in ("length", "E", "area", "inertia", "kappa"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise SolverError(f"element {name} must be finite and > 0, got {v}")
        if not -1.0 < self.nu < 0.5:
            raise SolverError(f"element Poisson's ratio {self.nu} outside (-1, 0.5)")

    @property
    def G(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def shear_parameter(self) -> float:
        return 12.0 * self.E * self.inertia / (self.kappa * self.G * self.area * self.length**2)

    def _end_coords(self):
        return np.array([[0.0, 0.0], [self.length * math.cos(self.angle), self.length * math.sin(self.angle)]])


def element_stiffness(e: ElementState) -> np.ndarray:
    """6x6 stiffness in global axes, DOF order (ux1, uy1, th1, ux2, uy2, th2)."""
    k, _, _ = element_matrices(
        e._end_coords(), np.array([[0, 1]]), *(np.array([v]) for v in (e.E, e.G, e.area, e.inertia, e.kappa))
    )
    k = k[0]
    if not np.all(np.isfinite(k)):
        raise SolverError("element stiffness has non-finite entries")
    return k


def element_thermal_load(e: ElementState, delta_t: float) -> np.ndarray:
    """Nodal forces equivalent to a restrained uniform thermal strain."""
    N = e.E * e.area * e.alpha * delta_t
    c, s = math.cos(e.angle), math.sin(e.angle)
    return np.array([-N * c, -N * s, 0.0, N * c, N * s, 0.0])


@dataclass(frozen=True)
class ElementProperties:
    E: np.ndarray
    G: np.ndarray
    alpha: np.ndarray
    area: np.ndarray
    inertia: np.ndarray
    kappa: np.ndarray


def element_properties(mesh: Mesh, materials: MaterialTable, temperature: float) -> ElementProperties:
    cache = {}
    for mid in set(mesh.element_material):
        mat = materials[mid]
        cache[mid] = (mat.youngs_modulus(temperature), mat.shear_modulus(temperature), mat.alpha(temperature))
    E, G, alpha = (np.array([cache[m][i] for m in mesh.element_material], dtype=float) for i in range(3))
    area = np.array([s.area for s in mesh.element_section], dtype=float)
    inertia = np.array([s.inertia for s in mesh.element_section], dtype=float)
    kappa = np.array([s.kappa for s in mesh.element_section], dtype=float)
    if np.any(kappa <= 0.0) or not np.all(np.isfinite(kappa)):
        raise SolverError("shear correction factor must be finite and > 0")
    return ElementProperties(E, G, alpha, area, inertia, kappa)


@dataclass(frozen=True)
class GlobalSystem:
    K: np.ndarray
    F: np.ndarray
    temperature: float
    delta_t: float

    @property
    def n_dof(self) -> int:
        return self.K.shape[0]


def assemble(
    mesh: Mesh,
    temperature: float,
    delta_t: float = 0.0,
    materials: MaterialTable = DEFAULT_MATERIALS,
) -> GlobalSystem:
    if mesh.n_elements == 0:
        raise MeshError("mesh has no elements")
    conn = np.ascontiguousarray(mesh.connectivity, dtype=np.int64)
    if np.any(conn[:, 0] == conn[:, 1]):
        raise MeshError("element connects a node to itself")
    if len({tuple(sorted(p)) for p in conn.tolist()}) != len(conn):
        raise MeshError("duplicate element connectivity")
    coords = np.ascontiguousarray(mesh.coords, dtype=float)
    d = coords[conn[:, 1]] - coords[conn[:, 0]]
    if np.any(np.hypot(d[:, 0], d[:, 1]) <= 0.0):
        raise MeshError("zero-length element")
    p = element_properties(mesh, materials, temperature)
    K, F = kernels.assemble_arrays(coords, conn, p.E, p.G, p.alpha, p.area, p.inertia, p.kappa, delta_t)
    if not (np.all(np.isfinite(K)) and np.all(np.isfinite(F))):
        raise SolverError("assembled system has non-finite entries")
    return GlobalSystem(K, F, temperature, delta_t)


@dataclass(frozen=True)
class Relation:
    terms: tuple[tuple[int, float], ...]
    rhs: float = 0.0
    label: str = ""


@dataclass(frozen=True)
class PbcConstraintSet:
    n_nodal: int
    relations: tuple[Relation, ...]
    anchor: int = -1
    pair_counts: dict = field(default_factory=dict)

    @property
    def dx_index(self) -> int:
        return self.n_nodal

    @property
    def dy_index(self) -> int:
        return self.n_nodal + 1

    @property
    def n_unknowns(self) -> int:
        return self.n_nodal + 2

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        C = np.zeros((len(self.relations), self.n_unknowns))
        rhs = np.zeros(len(self.relations))
        for r, rel in enumerate(self.relations):
            for dof, coeff in rel.terms:
                C[r, dof] += coeff
            rhs[r] = rel.rhs
        return C, rhs

    def with_prescribed_dx(self, value: float) -> "PbcConstraintSet":
        extra = Relation(((self.dx_index, 1.0),), float(value), "prescribed dx")
        return PbcConstraintSet(self.n_nodal, self.relations + (extra,), self.anchor, self.pair_counts)


def _jump(a: int, b: int, comp: int, macro: int | None, label: str) -> Relation:
    terms = [(3 * b + comp, 1.0), (3 * a + comp, -1.0)]
    if macro is not None:
        terms.append((macro, -1.0))
    return Relation(tuple(terms), 0.0, label)


def build_pbc_constraints(mesh: Mesh) -> PbcConstraintSet:
    """Periodic relations for every boundary pair plus the anchor node.

    For a pair (a, b) separated by the cell along x: u_b - u_a = dx, with equal
    uy and rotation. Along y likewise with dy. Corners are chained from the
    south-west corner.
    """
    n = mesh.n_dof
    dx, dy = n, n + 1
    missing = [k for k in ("sw", "se", "ne", "nw") if k not in mesh.corners]
    if missing:
        raise MeshError(f"corner node(s) {', '.join(m.upper() for m in missing)} missing; periodic pairing needs all four")
    if not mesh.left_right or not mesh.bottom_top:
        raise MeshError("boundary pairing tables are empty")

    rels = []

    def pair(a, b, shift_x, shift_y, tag):
        name = f"{mesh.node_label(a)}->{mesh.node_label(b)}"
        rels.append(_jump(a, b, 0, dx if shift_x else None, f"{tag} ux {name}"))
        rels.append(_jump(a, b, 1, dy if shift_y else None, f"{tag} uy {name}"))
        rels.append(_jump(a, b, 2, None, f"{tag} rz {name}"))

    for a, b in mesh.left_right:
        pair(a, b, True, False, "left/right")
    for a, b in mesh.bottom_top:
        pair(a, b, False, True, "bottom/top")
    c = mesh.corners
    pair(c["sw"], c["se"], True, False, "corner")
    pair(c["nw"], c["ne"], True, False, "corner")
    pair(c["sw"], c["nw"], False, True, "corner")

    anchor = mesh.bottom_top[len(mesh.bottom_top) // 2][0]
    rels.append(Relation(((3 * anchor, 1.0),), 0.0, f"anchor ux {mesh.node_label(anchor)}"))
    rels.append(Relation(((3 * anchor + 1, 1.0),), 0.0, f"anchor uy {mesh.node_label(anchor)}"))
    counts = {"left_right": len(mesh.left_right), "bottom_top": len(mesh.bottom_top), "corner_links": 3}
    return PbcConstraintSet(n, tuple(rels), anchor, counts)


@dataclass(frozen=True)
class SolutionField:
    u: np.ndarray  # nodal DOFs
    dx: float
    dy: float
    multipliers: np.ndarray
    residual: float  # normwise backward error of the equilibrated bordered system
    constraint_error: float  # max |C z - rhs|

    def nodal(self, node: int) -> np.ndarray:
        return self.u[3 * node : 3 * node + 3]


RESIDUAL_LIMIT = 1e-8
REFINE_ABOVE = 1e-12
EQUILIBRATION_SWEEPS = 20


def _equilibrate(rows: np.ndarray, cols: np.ndarray, vals: np.ndarray, n: int) -> np.ndarray:
    """Ruiz scaling vector d so that every row of diag(d) A diag(d) has max ~1.

    ``A`` is given by its nonzeros, sorted by row with every row present.
    """
    starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
    absv = np.abs(vals)
    d = np.ones(n)
    for _ in range(EQUILIBRATION_SWEEPS):
        r = np.sqrt(np.maximum.reduceat(absv * d[cols], starts) * d)
        r[r == 0.0] = 1.0
        d = d / r
        if np.all(np.abs(r - 1.0) < 1e-3):
            break
    return d


def _bordered(K: np.ndarray, C: np.ndarray, n: int):
    """Nonzeros of [[K, C^T], [C, 0]], sorted by row."""
    ki, kj = np.nonzero(K)
    ci, cj = np.nonzero(C)
    rows = np.concatenate([ki, cj, ci + n])
    cols = np.concatenate([kj, ci + n, cj])
    vals = np.concatenate([K[ki, kj], C[ci, cj], C[ci, cj]])
    order = np.argsort(rows, kind="stable")
    return rows[order], cols[order], vals[order]


def solve_constrained(
    system: GlobalSystem, constraints: PbcConstraintSet, prescribed_dx: float | None = None
) -> SolutionField:
    """Multiplier (bordered) solve of K u = F subject to the periodic relations."""
    if constraints.n_nodal != system.n_dof:
        raise SolverError("constraint set does not match the system size")
    if prescribed_dx is not None:
        if np.any(system.F != 0.0):
            raise SolverError("prescribed extension given together with a thermal load")
        constraints = constraints.with_prescribed_dx(prescribed_dx)

    C, rhs = constraints.matrix()
    n = constraints.n_unknowns
    m = C.shape[0]
    size = n + m
    b = np.zeros(size)
    b[: system.n_dof] = system.F
    b[n:] = rhs

    rows, cols, vals = _bordered(system.K, C, n)
    if np.unique(rows).size != size:
        raise SolverError("constrained system is singular: an unknown has no coupling")
    # Symmetric equilibration: the weak corner beams are ~1e-8 as stiff as
    # the rest, and without it their DOFs only get absolute accuracy.
    d = _equilibrate(rows, cols, vals, size)
    As = sparse.csc_matrix((vals * d[rows] * d[cols], (rows, cols)), shape=(size, size))
    bs = d * b
    anorm = float(np.abs(As).sum(axis=1).max())
    bnorm = float(np.abs(bs).max())

    # Normwise backward error. The bordered solution carries multipliers and
    # rotations far larger than the load, so |b| alone is not a usable scale.
    def rel_residual(y):
        res = float(np.abs(bs - As @ y).max())
        scale = anorm * float(np.abs(y).max()) + bnorm
        return res / scale if scale > 0 else res

    try:
        lu = splu(As)
        y = lu.solve(bs)
        if not np.all(np.isfinite(y)):
            raise SolverError("constrained solve produced non-finite values")
        rel = rel_residual(y)
        if rel > REFINE_ABOVE:
            y2 = y + lu.solve(bs - As @ y)
            rel2 = rel_residual(y2)
            if rel2 < rel:
                y, rel = y2, rel2
    except RuntimeError as exc:  # splu reports exact singularity this way
        raise SolverError(f"constrained system is singular: {exc}") from None
    if rel > RESIDUAL_LIMIT:
        raise SolverError(f"constrained solve did not converge (relative residual {rel:.2e})")
    z = d * y
    cons_err = float(np.max(np.abs(C @ z[:n] - rhs))) if m else 0.0
    return SolutionField(
        u=z[: system.n_dof],
        dx=float(z[constraints.dx_index]),
        dy=float(z[constraints.dy_index]),
        multipliers=z[n:],
        residual=rel,
        constraint_error=cons_err,
    )


def element_axial_forces(
    mesh: Mesh, u: np.ndarray, temperature: float, delta_t: float, materials: MaterialTable = DEFAULT_MATERIALS
) -> np.ndarray:
    """Axial force per element, net of the free thermal strain."""
    p = element_properties(mesh, materials, temperature)
    conn = mesh.connectivity
    d = mesh.coords[conn[:, 1]] - mesh.coords[conn[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    e = d / length[:, None]
    du = u.reshape(-1, 3)[conn[:, 1], :2] - u.reshape(-1, 3)[conn[:, 0], :2]
    strain = np.einsum("ij,ij->i", du, e) / length
    return p.E * p.area * (strain - p.alpha * delta_t)


def dump_system(system: GlobalSystem, constraints: PbcConstraintSet, solution: SolutionField | None = None) -> dict:
    """Plain-data snapshot of K, F, the constraint rows and (optionally) U."""
    doc = {
        "n_dof": system.n_dof,
        "temperature": system.temperature,
        "delta_t": system.delta_t,
        "K": system.K.tolist(),
        "F": system.F.tolist(),
        "constraints": [
            {"label": r.label, "terms": [[d, c] for d, c in r.terms], "rhs": r.rhs} for r in constraints.relations
        ],
        "macro_dofs": {"dx": constraints.dx_index, "dy": constraints.dy_index},
    }
    if solution is not None:
        doc["U"] = solution.u.tolist()
        doc["dx"] = solution.dx
        doc["dy"] = solution.dy
        doc["residual"] = solution.residual
    return doc


def solve_supported(system: GlobalSystem, fixed_dofs, loads: dict | None = None) -> np.ndarray:
    """Direct solve with homogeneous supports; used by the analytic checks."""
    fixed = sorted(set(int(d) for d in fixed_dofs))
    free = np.setdiff1d(np.arange(system.n_dof), fixed)
    F = system.F.copy()
    for dof, value in (loads or {}).items():
        F[dof] += value
    try:
        uf = np.linalg.solve(system.K[np.ix_(free, free)], F[free])
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"supported system is singular: {exc}") from None
    u = np.zeros(system.n_dof)
    u[free] = uf
    return u


def line_mesh(length: float, n_elements: int, thickness: float, material: str, kappa: float, angle: float = 0.0) -> Mesh:
    """Straight chain of elements starting at the origin (no periodic boundary)."""
    from .mesh import Section

    s = np.linspace(0.0, length, n_elements + 1)
    coords = np.column_stack([s * math.cos(angle), s * math.sin(angle)])
    coords.setflags(write=False)
    conn = np.column_stack([np.arange(n_elements), np.arange(1, n_elements + 1)]).astype(np.int64)
    sec = Section.rectangular(thickness, kappa)
    return Mesh(
        coords, conn, (material,) * n_elements, (sec,) * n_elements, np.zeros(n_elements, dtype=np.int64),
        length, (), (), {}, {},
    )
