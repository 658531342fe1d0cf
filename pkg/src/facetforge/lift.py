"""Lift the planar chain into a spatial vector system fit for the Minkowski solve.

The planar edge vectors already sum to zero with no two positively
proportional, but they span only a plane.  Two lifts break planarity while
preserving closure:

* ``half_fold`` rotates a contiguous run of edges by 90 degrees about the
  chord joining its endpoints, leaving every resulting vector in one of two
  orthogonal planes.
* ``balanced_spins`` rotates disjoint successive pairs about the line along
  each pair's sum, by independent seeded random angles, spreading the normals
  more evenly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .cyclic import CyclicPolygon
from .errors import BadK, LiftFailed

logger = logging.getLogger(__name__)

CLOSURE_RTOL = 1e-9        # on sum of vector norms
PARALLEL_DOT_TOL = 1e-9    # max allowed normal pair dot is 1 - this
SPAN_SV_TOL = 1e-6         # smallest singular value certifying full rank
SPIN_DEGREES = (30.0, 150.0)
MAX_SPIN_RETRIES = 32


@dataclass(frozen=True, eq=False)
class EquilibratedSystem:
    """Vectors v_i = A_i * n_i that sum to zero, are pairwise non-positively-
    proportional, and span all of space."""

    vectors: np.ndarray   # (n, 3)
    normals: np.ndarray   # (n, 3) unit
    areas: np.ndarray     # (n,) vector lengths
    mode: str             # "half-fold" | "balanced"
    k: int | None = None
    seed: int | None = None

    def __post_init__(self):
        for arr in (self.vectors, self.normals, self.areas):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.areas)


@dataclass(frozen=True)
class ValidationReport:
    closure_norm: float
    closure_bound: float
    max_pair_dot: float
    third_singular_value: float
    closure_ok: bool
    pairs_ok: bool
    span_ok: bool
    count_ok: bool

    @property
    def passed(self) -> bool:
        return self.closure_ok and self.pairs_ok and self.span_ok and self.count_ok


def _system_from_vectors(vectors: np.ndarray, mode: str, k=None, seed=None) -> EquilibratedSystem:
    lengths = np.linalg.norm(vectors, axis=1)
    normals = vectors / lengths[:, None]
    return EquilibratedSystem(vectors=vectors, normals=normals, areas=lengths,
                              mode=mode, k=k, seed=seed)


def validate_system(sys: EquilibratedSystem) -> ValidationReport:
    """Check closure, pairwise non-parallelism, and spanning; never raises."""
    total = float(sys.areas.sum())
    closure = float(np.linalg.norm(sys.vectors.sum(axis=0)))
    bound = CLOSURE_RTOL * total

    dots = sys.normals @ sys.normals.T
    np.fill_diagonal(dots, -1.0)
    max_dot = float(dots.max())

    sv = np.linalg.svd(sys.normals, compute_uv=False)
    third = float(sv[2]) if len(sv) >= 3 else 0.0

    return ValidationReport(
        closure_norm=closure,
        closure_bound=bound,
        max_pair_dot=max_dot,
        third_singular_value=third,
        closure_ok=closure <= bound,
        pairs_ok=max_dot < 1.0 - PARALLEL_DOT_TOL,
        span_ok=third > SPAN_SV_TOL,
        count_ok=sys.n >= 4,
    )


def half_fold(poly: CyclicPolygon, k: int) -> EquilibratedSystem:
    """Fold edges 1..k out of plane about the chord joining their endpoints.

    The polygon is rigidly moved so the chord from the base of edge 1 to the
    head of edge k lies on the y-axis, then the folded run is rotated 90
    degrees about that axis (toward positive z).  Both chord endpoints stay
    fixed, so the vectors still sum to zero; the folded vectors lie in the
    yz-plane and the rest remain in the xy-plane.
    """
    n = poly.n
    if not 2 <= k <= n - 2:
        raise BadK(f"k must be in [2, {n - 2}] for n = {n}, got {k}")

    pts = poly.vertices[:, :2]
    a = pts[0]
    b = pts[k]
    chord = b - a
    beta = math.pi / 2.0 - math.atan2(chord[1], chord[0])
    rot = np.array([[math.cos(beta), -math.sin(beta)],
                    [math.sin(beta), math.cos(beta)]])
    q = (pts - a) @ rot.T  # chord now runs up the y-axis from the origin

    folded = np.zeros((n, 3))
    folded[:, :2] = q
    first = np.arange(n) <= k
    interior_x = q[1:k, 0]
    side = 1.0 if interior_x.sum() >= 0.0 else -1.0
    folded[first, 2] = side * q[first, 0]
    folded[first, 0] = 0.0

    vectors = np.roll(folded, -1, axis=0) - folded
    return _system_from_vectors(vectors, mode="half-fold", k=k)


def _rotation_about(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a unit axis."""
    x, y, z = axis
    c, s = math.cos(angle), math.sin(angle)
    cc = 1.0 - c
    return np.array([
        [c + x * x * cc, x * y * cc - z * s, x * z * cc + y * s],
        [y * x * cc + z * s, c + y * y * cc, y * z * cc - x * s],
        [z * x * cc - y * s, z * y * cc + x * s, c + z * z * cc],
    ])


def _spin_pairs(vectors: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rotate disjoint successive pairs about the axis along each pair's sum.

    The pair sum is parallel to the axis, hence invariant, so total closure is
    preserved exactly.  An odd trailing vector is left untouched.
    """
    out = vectors.copy()
    for p, angle in enumerate(angles):
        i = 2 * p
        axis = vectors[i] + vectors[i + 1]
        axis = axis / np.linalg.norm(axis)
        rot = _rotation_about(axis, angle)
        out[i] = rot @ vectors[i]
        out[i + 1] = rot @ vectors[i + 1]
    return out


def _draw_spin_angles(rng: np.random.Generator, n_pairs: int) -> np.ndarray:
    """One batch of pair angles; separate so tests can force degenerate draws."""
    lo, hi = np.deg2rad(SPIN_DEGREES)
    return rng.uniform(lo, hi, size=n_pairs)


def balanced_spins(poly: CyclicPolygon, seed: int) -> EquilibratedSystem:
    """Spin successive vector pairs by independent random angles until the
    system validates; angles stay in a band away from 0 and 180 degrees.

    Retries with fresh draws from the same seeded generator when a draw lands
    on a degenerate configuration (planar or with aligned vectors).
    """
    vectors0 = poly.edge_vectors.copy()
    n_pairs = poly.n // 2
    rng = np.random.default_rng(seed)

    last_report = None
    for attempt in range(MAX_SPIN_RETRIES):
        angles = _draw_spin_angles(rng, n_pairs)
        sys = _system_from_vectors(_spin_pairs(vectors0, angles),
                                   mode="balanced", seed=seed)
        report = validate_system(sys)
        if report.passed:
            if attempt:
                logger.info("balanced spins succeeded after %d retries", attempt)
            return sys
        last_report = report
        logger.warning("balanced spins attempt %d failed validation, retrying", attempt)

    raise LiftFailed(
        f"no valid spin configuration after {MAX_SPIN_RETRIES} attempts "
        f"(seed={seed}, last report: {last_report})")
