"""Subdivision of lattice members into two-node beam elements."""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import MeshError
from .geometry import RveModel

DEFAULT_SEED_FACTOR = 0.085
SHEAR_CORRECTION = 5.0 / 6.0
DOF_PER_NODE = 3  # ux, uy, theta_z


@dataclass(frozen=True)
class Section:
    area: float
    inertia: float
    kappa: float

    @classmethod
    def rectangular(cls, t: float, kappa: float = SHEAR_CORRECTION) -> "Section":
        """Rectangle t wide and of unit out-of-plane depth."""
        return cls(t, t**3 / 12.0, kappa)


@dataclass(frozen=True)
class Mesh:
    coords: np.ndarray  # (n_nodes, 2)
    connectivity: np.ndarray  # (n_elements, 2) int
    element_material: tuple[str, ...]
    element_section: tuple[Section, ...]
    element_member: np.ndarray  # owning member index per element
    edge_length: float
    left_right: tuple[tuple[int, int], ...]
    bottom_top: tuple[tuple[int, int], ...]
    corners: dict  # keys sw, se, ne, nw -> node id (missing key = absent corner)
    node_names: dict  # model node id -> name (model nodes come first)

    @property
    def n_nodes(self) -> int:
        return self.coords.shape[0]

    @property
    def n_elements(self) -> int:
        return self.connectivity.shape[0]

    @property
    def n_dof(self) -> int:
        return DOF_PER_NODE * self.n_nodes

    def node_label(self, i: int) -> str:
        return self.node_names.get(i, f"node{i}")

    def without_node(self, node: int) -> "Mesh":
        """Copy with one boundary node dropped from the pairing tables (negative tests)."""
        corners = {k: v for k, v in self.corners.items() if v != node}
        lr = tuple(p for p in self.left_right if node not in p)
        bt = tuple(p for p in self.bottom_top if node not in p)
        return Mesh(
            self.coords, self.connectivity, self.element_material, self.element_section,
            self.element_member, self.edge_length, lr, bt, corners, self.node_names,
        )


def elements_for_length(length: float, target: float) -> int:
    # guard against 2.0000000000000004 style ceilings
    return max(1, math.ceil(length / target - 1e-9))


def mesh_rve(model: RveModel, seed_factor: float = DEFAULT_SEED_FACTOR, kappa: float = SHEAR_CORRECTION) -> Mesh:
    if not 0.0 < seed_factor <= 1.0:
        raise MeshError(f"seed_factor must lie in (0, 1], got {seed_factor}")
    L = model.edge_length
    target = seed_factor * L
    coords = [tuple(p) for p in model.nodes]
    conn, mats, secs, owner = [], [], [], []
    for k, m in enumerate(model.members):
        n = elements_for_length(model.member_length(m), target)
        pa, pb = np.asarray(model.nodes[m.a]), np.asarray(model.nodes[m.b])
        chain = [m.a]
        for j in range(1, n):
            coords.append(tuple(pa + (pb - pa) * (j / n)))
            chain.append(len(coords) - 1)
        chain.append(m.b)
        sec = Section.rectangular(m.thickness, kappa)
        for i0, i1 in zip(chain, chain[1:]):
            conn.append((i0, i1))
            mats.append(m.material)
            secs.append(sec)
            owner.append(k)

    xy = np.array(coords, dtype=float)
    xy.setflags(write=False)
    connectivity = np.array(conn, dtype=np.int64).reshape(-1, 2)
    connectivity.setflags(write=False)
    member_of = np.array(owner, dtype=np.int64)
    member_of.setflags(write=False)

    b = model.boundary_sets
    tol = 1e-9 * L
    left_right = _pair(xy, b.get("left", ()), b.get("right", ()), axis=1, gap=(L, 0.0), tol=tol, names=model.node_names)
    bottom_top = _pair(xy, b.get("bottom", ()), b.get("top", ()), axis=0, gap=(0.0, L), tol=tol, names=model.node_names)
    corners = _classify_corners(xy, b.get("corners", ()), model.node_names)
    return Mesh(
        xy, connectivity, tuple(mats), tuple(secs), member_of, L,
        left_right, bottom_top, corners, dict(enumerate(model.node_names)),
    )


def _pair(xy, first, second, axis, gap, tol, names):
    if len(first) != len(second):
        raise MeshError(f"boundary sets differ in size ({len(first)} vs {len(second)})")
    pairs = []
    free = list(second)
    for i in first:
        match = [j for j in free if np.allclose(xy[j] - xy[i], gap, atol=tol, rtol=0.0)]
        if not match:
            raise MeshError(f"boundary node {names[i]} has no periodic partner")
        free.remove(match[0])
        pairs.append((i, match[0]))
    return tuple(pairs)


def _classify_corners(xy, ids, names):
    out = {}
    for i in ids:
        x, y = xy[i]
        key = ("s" if y < 0 else "n") + ("w" if x < 0 else "e")
        if key in out:
            raise MeshError(f"two corner nodes in quadrant {key}: {names[out[key]]}, {names[i]}")
        out[key] = i
    return out
