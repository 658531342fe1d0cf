"""Convex geometry kernel: halfspace intersection, measurement, area Jacobian.

The polyhedron P(h) = {x : x . n_i <= h_i} is built by brute-force triple-plane
enumeration: every triple of planes is intersected, candidate points are kept
when they satisfy all halfspaces, deduplicated, and assigned to facets by
plane membership.  Cubic in the number of planes, which is perfectly fine at
the scales this package targets (n <= 64), and has no combinatorial corner
cases to get wrong.

Facets that touch no vertex are kept as first-class absent facets (empty cycle,
zero area): the Minkowski solver iterates through support vectors where target
facets momentarily vanish.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateCombinatorics,
    EmptyInterior,
    InconsistentVolume,
    InternalGeometryError,
    UnboundedRegion,
)

MEMBER_RTOL = 1e-9        # facet membership, relative to max |h|
DEDUPE_RTOL = 1e-9        # vertex merging, relative to diameter
DET_TOL = 1e-12           # reject nearly singular plane triples
CLOSURE_RTOL = 1e-8       # measured sum A_i n_i, relative to sum A_i
VOLUME_RTOL = 1e-9        # agreement of the two volume formulas
MIN_EDGE_RTOL = 1e-10     # Jacobian edge-length degeneracy, relative to diameter


@dataclass(frozen=True, eq=False)
class SupportVector:
    """Per-facet support numbers h with the unit normals they refer to."""

    values: np.ndarray      # (n,)
    normals_ref: np.ndarray  # (n, 3)

    def __post_init__(self):
        self.values.setflags(write=False)
        self.normals_ref.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """Explicit vertices plus per-input-normal facet cycles and measures.

    ``facets[i]`` is ``(i, cycle)`` with the vertex indices of facet i ordered
    counterclockwise as seen from outside; absent facets carry an empty cycle
    and zero area.
    """

    vertices: np.ndarray                     # (V, 3)
    facets: tuple[tuple[int, tuple[int, ...]], ...]
    facet_areas: np.ndarray                  # (n,)
    facet_normals: np.ndarray                # (n, 3) echo of the inputs
    volume: float
    support: np.ndarray = field(repr=False, default=None)  # (n,) echo of h
    diameter: float = 0.0

    def __post_init__(self):
        for arr in (self.vertices, self.facet_areas, self.facet_normals, self.support):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n_facets_present(self) -> int:
        return sum(1 for _, cycle in self.facets if cycle)


def _check_unit_normals(normals: np.ndarray) -> np.ndarray:
    normals = np.asarray(normals, dtype=float)
    if normals.ndim != 2 or normals.shape[1] != 3:
        raise ValueError(f"normals must be (n, 3), got {normals.shape}")
    lengths = np.linalg.norm(normals, axis=1)
    if np.any(np.abs(lengths - 1.0) > 1e-8):
        raise ValueError("normals must be unit vectors")
    return normals / lengths[:, None]


def positively_spans(normals: np.ndarray, tol: float = 1e-12) -> bool:
    """True when 0 is interior to the convex hull of the normals.

    Solved as a small LP: maximize t subject to sum(lam_i n_i) = 0,
    sum(lam_i) = 1, lam_i >= t.  Positive optimum certifies that every
    direction is blocked, i.e. P(h) is bounded for every h.
    """
    n = len(normals)
    # variables: lam_1..lam_n, t
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_eq = np.zeros((4, n + 1))
    a_eq[:3, :n] = normals.T
    a_eq[3, :n] = 1.0
    b_eq = np.array([0.0, 0.0, 0.0, 1.0])
    a_ub = np.zeros((n, n + 1))
    a_ub[:, :n] = -np.eye(n)
    a_ub[:, -1] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * n + [(None, None)], method="highs")
    return bool(res.status == 0 and res.x is not None and res.x[-1] > tol)


def _candidate_vertices(normals: np.ndarray, h: np.ndarray) -> np.ndarray:
    n = len(h)
    triples = np.array(list(itertools.combinations(range(n), 3)))
    mats = normals[triples]                   # (m, 3, 3)
    dets = np.abs(np.linalg.det(mats))
    keep = dets > DET_TOL
    if not np.any(keep):
        return np.empty((0, 3))
    pts = np.linalg.solve(mats[keep], h[triples[keep]][..., None])[..., 0]
    member_tol = MEMBER_RTOL * max(1.0, float(np.abs(h).max()))
    feasible = (pts @ normals.T - h[None, :]).max(axis=1) <= member_tol
    return pts[feasible]


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    """Merge points closer than tol; each cluster becomes its mean."""
    order = np.lexsort(points.T)
    pts = points[order]
    groups: list[list[int]] = []
    reps: list[np.ndarray] = []
    for i, p in enumerate(pts):
        for g, rep in zip(groups, reps):
            if np.linalg.norm(p - rep) <= tol:
                g.append(i)
                break
        else:
            groups.append([i])
            reps.append(p)
    return np.array([pts[g].mean(axis=0) for g in groups])


def _facet_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right-handed in-plane basis (t1, t2) with t1 x t2 = normal."""
    axis = np.zeros(3)
    axis[np.argmin(np.abs(normal))] = 1.0
    t1 = np.cross(normal, axis)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(normal, t1)
    return t1, t2


def intersect_halfspaces(normals, h, *, assume_bounded: bool = False) -> Polyhedron:
    """Intersect halfspaces x . n_i <= h_i into an explicit bounded polyhedron.

    ``assume_bounded`` skips the positive-spanning LP; callers that intersect
    repeatedly with fixed normals (the Minkowski solver) check once up front.
    """
    normals = _check_unit_normals(normals)
    h = np.asarray(h, dtype=float)
    n = len(h)
    if normals.shape[0] != n:
        raise ValueError("normals and h lengths differ")
    if n < 4:
        raise EmptyInterior("fewer than 4 halfspaces cannot bound a region")

    if not assume_bounded and not positively_spans(normals):
        raise UnboundedRegion("normals do not positively span R^3")

    candidates = _candidate_vertices(normals, h)
    if len(candidates) == 0:
        raise EmptyInterior("no feasible plane-triple intersection points")

    span = np.linalg.norm(candidates.max(axis=0) - candidates.min(axis=0))
    verts = _dedupe(candidates, DEDUPE_RTOL * max(span, 1e-300))
    if len(verts) < 4:
        raise EmptyInterior(f"degenerate region with {len(verts)} vertex(es)")

    diffs = verts[:, None, :] - verts[None, :, :]
    diameter = float(np.sqrt((diffs ** 2).sum(axis=2).max()))

    member_tol = MEMBER_RTOL * max(1.0, float(np.abs(h).max()))
    on_plane = np.abs(verts @ normals.T - h[None, :]) <= member_tol

    facets: list[tuple[int, tuple[int, ...]]] = []
    areas = np.zeros(n)
    for i in range(n):
        idx = np.flatnonzero(on_plane[:, i])
        if len(idx) < 3:
            facets.append((i, ()))
            continue
        pts = verts[idx]
        t1, t2 = _facet_basis(normals[i])
        rel = pts - pts.mean(axis=0)
        order = np.argsort(np.arctan2(rel @ t2, rel @ t1))
        cycle = idx[order]
        ring = verts[cycle]
        area2 = np.cross(ring, np.roll(ring, -1, axis=0)).sum(axis=0) @ normals[i]
        if area2 < 0.0:
            raise InternalGeometryError(f"facet {i} sorted clockwise")
        areas[i] = 0.5 * area2
        facets.append((i, tuple(int(j) for j in cycle)))

    volume = float(h @ areas) / 3.0
    poly = Polyhedron(vertices=verts, facets=tuple(facets), facet_areas=areas,
                      facet_normals=normals, volume=volume, support=h.copy(),
                      diameter=diameter)
    _check_polyhedron(poly)
    return poly


def _euler_check(poly: Polyhedron) -> None:
    edge_count: dict[tuple[int, int], int] = {}
    for _, cycle in poly.facets:
        if not cycle:
            continue
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            key = (a, b) if a < b else (b, a)
            edge_count[key] = edge_count.get(key, 0) + 1
    if any(c != 2 for c in edge_count.values()):
        raise InternalGeometryError("an edge is not shared by exactly two facets")
    v = len(poly.vertices)
    e = len(edge_count)
    f = poly.n_facets_present
    if v - e + f != 2:
        raise InternalGeometryError(f"Euler check failed: V-E+F = {v}-{e}+{f}")


def _check_polyhedron(poly: Polyhedron) -> None:
    h = poly.support
    member_tol = MEMBER_RTOL * max(1.0, float(np.abs(h).max()))
    slack = poly.vertices @ poly.facet_normals.T - h[None, :]
    if slack.max() > member_tol:
        raise InternalGeometryError("a vertex violates a halfspace")
    if poly.volume <= 0.0:
        raise InternalGeometryError(f"non-positive volume {poly.volume:g}")
    closure = np.linalg.norm(poly.facet_areas @ poly.facet_normals)
    if closure > CLOSURE_RTOL * poly.facet_areas.sum():
        raise InternalGeometryError(f"measured area vectors do not close: {closure:g}")
    _euler_check(poly)


def measure(poly: Polyhedron) -> tuple[np.ndarray, float]:
    """Re-measure facet areas and volume from the stored cycles.

    The volume comes out two independent ways: the support form
    ``sum(h_i A_i) / 3`` and a signed-tetrahedra sum fanned from the vertex
    centroid; disagreement signals a kernel bug.
    """
    areas = np.zeros(len(poly.facets))
    centroid = poly.vertices.mean(axis=0)
    vol_tets = 0.0
    for i, cycle in poly.facets:
        if not cycle:
            continue
        ring = poly.vertices[list(cycle)]
        areas[i] = 0.5 * (np.cross(ring, np.roll(ring, -1, axis=0)).sum(axis=0)
                          @ poly.facet_normals[i])
        base = ring[0] - centroid
        for a, b in zip(ring[1:-1] - centroid, ring[2:] - centroid):
            vol_tets += np.cross(base, a) @ b / 6.0
    vol_support = float(poly.support @ areas) / 3.0
    scale = max(abs(vol_support), abs(vol_tets))
    if abs(vol_support - vol_tets) > VOLUME_RTOL * scale:
        raise InconsistentVolume(
            f"support volume {vol_support!r} vs tetrahedra volume {vol_tets!r}")
    return areas, vol_support


def area_jacobian(normals, h, *, poly: Polyhedron | None = None) -> np.ndarray:
    """Sensitivities dA_i/dh_j of facet areas to support numbers.

    For adjacent facets the derivative is the shared edge length divided by
    the sine of the normal angle; diagonals follow from translation
    invariance: J n_e = 0 for each coordinate direction e.  The matrix is
    symmetric.  Raises when the combinatorics are not stable under
    perturbation (a vanishing edge, or a vertex on more than three planes).
    """
    if poly is None:
        poly = intersect_halfspaces(normals, h, assume_bounded=True)
    normals = poly.facet_normals
    n = len(poly.facet_areas)

    member_tol = MEMBER_RTOL * max(1.0, float(np.abs(poly.support).max()))
    on_plane = np.abs(poly.vertices @ normals.T - poly.support[None, :]) <= member_tol
    per_vertex = on_plane.sum(axis=1)
    if np.any(per_vertex > 3):
        raise DegenerateCombinatorics(
            f"{int((per_vertex > 3).sum())} vertex(es) lie on more than 3 planes")

    edge_owner: dict[tuple[int, int], int] = {}
    jac = np.zeros((n, n))
    min_edge = MIN_EDGE_RTOL * poly.diameter
    for i, cycle in poly.facets:
        if not cycle:
            continue
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            key = (a, b) if a < b else (b, a)
            j = edge_owner.pop(key, None)
            if j is None:
                edge_owner[key] = i
                continue
            length = float(np.linalg.norm(poly.vertices[a] - poly.vertices[b]))
            if length < min_edge:
                raise DegenerateCombinatorics(
                    f"edge between facets {i} and {j} has length {length:g}")
            sin_phi = float(np.linalg.norm(np.cross(normals[i], normals[j])))
            jac[i, j] = jac[j, i] = length / sin_phi
    cos = normals @ normals.T
    np.fill_diagonal(jac, 0.0)
    np.fill_diagonal(jac, -(jac * cos).sum(axis=1))
    return jac
