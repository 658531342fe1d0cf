"""Critical circumradius and planar layout of the closed chain of edges.

Treat the sorted areas ``A_1 >= ... >= A_n`` as chord lengths inscribed in a
circle of radius R.  Each chord subtends a central angle ``2*asin(A_i/(2R))``.
Shrinking R from infinity, the chain closes into a convex cyclic polygon at
the radius where the subtended angles balance:

* center inside the polygon:   sum_i 2*asin(A_i/(2R)) = 2*pi
* center outside (dominant A_1): 2*asin(A_1/(2R)) = sum_{i>1} 2*asin(A_i/(2R))

The first equation has a root only when A_1 is not too dominant; which branch
applies is decided once, at the smallest admissible radius R = A_1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InternalGeometryError, NoConvergence, RadiusTooSmall
from .feasibility import AreaSpec, Tag, classify

#: Default tolerance on the closing residual (radians).
DEFAULT_RADIUS_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class CyclicPolygon:
    """Convex polygon inscribed in a circle of radius ``radius`` about the origin.

    ``central_angles[i]`` is the signed angle subtended by edge i; the first
    entry is negative when the circumcenter lies outside the polygon.  Vertex 0
    sits at angle 0, i.e. at ``(radius, 0, 0)``, and edges run counterclockwise
    in the order of the sorted areas.
    """

    radius: float
    center_inside: bool
    central_angles: np.ndarray  # (n,)
    vertices: np.ndarray        # (n, 3), z = 0; vertex i is the base of edge i
    edge_vectors: np.ndarray    # (n, 3), edge i runs from vertex i to vertex i+1

    def __post_init__(self):
        for arr in (self.central_angles, self.vertices, self.edge_vectors):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.central_angles)

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.edge_vectors, axis=1)


def center_inside_branch(spec: AreaSpec) -> bool:
    """Branch test evaluated at the lower bracket R = A_1/2.

    At that radius the longest chord is a diameter; the center-inside equation
    has a root iff the remaining chords can still wrap the half circle.
    """
    a = spec.areas
    return math.fsum(2.0 * math.asin(min(x / a[0], 1.0)) for x in a[1:]) >= math.pi


def closure_residual(spec: AreaSpec, R: float) -> float:
    """Signed closing defect of the chain at radius R, on the applicable branch.

    Positive means the chain still overlaps itself (radius too small), negative
    means it falls short.  Monotone along the bisection bracket, so a sign
    change pins the closing radius.
    """
    a = spec.areas
    if R < a[0] / 2.0:
        raise RadiusTooSmall(f"R = {R:g} is below A_1/2 = {a[0] / 2.0:g}")
    angles = [2.0 * math.asin(min(x / (2.0 * R), 1.0)) for x in a]
    if center_inside_branch(spec):
        return math.fsum(angles) - 2.0 * math.pi
    return angles[0] - math.fsum(angles[1:])


def _residual_derivative(spec: AreaSpec, R: float, inside: bool) -> float:
    # d/dR of 2*asin(A/(2R)) is -A / (R^2 * sqrt(1 - (A/(2R))^2))
    a = np.asarray(spec.areas)
    u = a / (2.0 * R)
    with np.errstate(divide="ignore"):
        terms = -a / (R * R * np.sqrt(np.maximum(1.0 - u * u, 0.0)))
    if not np.all(np.isfinite(terms)):
        return math.nan
    if inside:
        return float(terms.sum())
    return float(terms[0] - terms[1:].sum())


def solve_radius(spec: AreaSpec, tol: float = DEFAULT_RADIUS_TOL) -> tuple[float, bool]:
    """Find the closing radius and report which branch it lies on.

    Brackets the root between R = A_1/2 and a geometrically grown upper bound,
    bisects (Brent), then polishes with Newton until the residual is below
    ``tol``.  Requires a strictly realizable (Solid) input; the equality case
    would degenerate to R = A_1/2.
    """
    cls = classify(spec)
    if cls.tag is not Tag.SOLID:
        raise ValueError(f"solve_radius needs a Solid input, got {cls.tag.value}")
    inside = center_inside_branch(spec)
    a1 = spec.areas[0]
    lo = (a1 / 2.0) * (1.0 + 1e-15)

    f = lambda R: closure_residual(spec, R)
    f_lo = f(lo)
    if f_lo <= 0.0:
        # Root numerically at the bracket edge (branch boundary).
        return lo, inside
    hi = max(a1, spec.total / 4.0)
    for _ in range(200):
        if f(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise NoConvergence("no sign change while growing the radius bracket")

    R = brentq(f, lo, hi, xtol=1e-15 * a1, rtol=8.0 * np.finfo(float).eps,
               maxiter=200)
    # Newton polish; brentq already lands near machine precision.
    for _ in range(8):
        r = f(R)
        if abs(r) <= tol:
            break
        d = _residual_derivative(spec, R, inside)
        if not math.isfinite(d) or d == 0.0:
            break
        step = r / d
        if not (lo <= R - step <= hi):
            break
        R -= step
    if abs(f(R)) > tol:
        raise NoConvergence(
            f"closing residual {f(R):.3e} still above tol {tol:g} at R = {R!r}")
    return R, inside


def layout_polygon(spec: AreaSpec, R: float, center_inside: bool) -> CyclicPolygon:
    """Place the closed chain on its circumcircle in the xy-plane.

    Vertices sit at cumulative central angles starting from angle 0, so the
    polygon closes exactly by construction; the solve tolerance shows up only
    as a tiny defect in the last edge length.
    """
    a = np.asarray(spec.areas)
    n = len(a)
    u = a / (2.0 * R)
    if np.any(u > 1.0):
        raise RadiusTooSmall(f"R = {R:g} is below A_1/2 = {spec.areas[0] / 2.0:g}")
    theta = 2.0 * np.arcsin(u)
    if not center_inside:
        theta[0] = -theta[0]

    vertex_angles = np.concatenate(([0.0], np.cumsum(theta)))[:-1]
    verts = np.zeros((n, 3))
    verts[:, 0] = R * np.cos(vertex_angles)
    verts[:, 1] = R * np.sin(vertex_angles)
    edges = np.roll(verts, -1, axis=0) - verts

    poly = CyclicPolygon(radius=float(R), center_inside=bool(center_inside),
                         central_angles=theta, vertices=verts, edge_vectors=edges)
    _check_polygon(poly, spec)
    return poly


def _check_polygon(poly: CyclicPolygon, spec: AreaSpec) -> None:
    a = np.asarray(spec.areas)
    total = a.sum()
    lengths = poly.edge_lengths()
    if np.max(np.abs(lengths - a) / a) > 1e-10:
        raise InternalGeometryError("edge lengths drift from the target areas")
    closure = np.linalg.norm(poly.edge_vectors.sum(axis=0))
    if closure > 1e-10 * total:
        raise InternalGeometryError(f"chain fails to close: |sum v| = {closure:g}")
    radii = np.linalg.norm(poly.vertices[:, :2], axis=1)
    if np.max(np.abs(radii - poly.radius)) > 1e-10 * poly.radius:
        raise InternalGeometryError("vertices stray from the circumcircle")
    e = poly.edge_vectors
    e_next = np.roll(e, -1, axis=0)
    cross = e[:, 0] * e_next[:, 1] - e[:, 1] * e_next[:, 0]
    if not (np.all(cross > 0.0) or np.all(cross < 0.0)):
        raise InternalGeometryError("vertex cycle is not strictly convex")
