"""Area list validation, realizability classification, and the flat (equality) construction.

A list of positive areas sorted descending is realizable as the face areas of a
closed convex polyhedron exactly when the largest area does not exceed the sum
of the rest.  The boundary case is realized by a degenerate "flat" polyhedron:
a doubly covered convex polygon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import NonFiniteArea, NonPositiveArea, NotFlat, UnsupportedCount

#: Default relative tolerance deciding the equality (flat) boundary.
DEFAULT_TOL_EQ = 1e-12


class Tag(Enum):
    """Realizability classes for an area list."""

    INFEASIBLE = "Infeasible"
    FLAT = "Flat"
    SOLID = "Solid"
    TRIANGLE_ONLY = "TriangleOnly"
    TWO_FACE_FLAT = "TwoFaceFlat"


@dataclass(frozen=True)
class AreaSpec:
    """Validated areas, sorted descending, with the sort permutation retained.

    ``permutation[i]`` is the position of ``areas[i]`` in the original input.
    """

    areas: tuple[float, ...]
    permutation: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.areas)

    @property
    def total(self) -> float:
        return math.fsum(self.areas)


@dataclass(frozen=True)
class Classification:
    tag: Tag
    slack: float  # sum of the smaller areas minus the largest


@dataclass(frozen=True)
class FlatPolyhedron:
    """Doubly covered square: one full face on top, parallel strips underneath."""

    side: float
    strip_widths: tuple[float, ...]
    top_face_area: float


def make_area_spec(raw) -> AreaSpec:
    """Validate a raw list of areas and sort it descending (stable)."""
    values = [float(x) for x in raw]
    if not values:
        raise UnsupportedCount("need at least one area")
    for i, x in enumerate(values):
        if math.isnan(x) or math.isinf(x):
            raise NonFiniteArea(f"area #{i} is not finite: {x!r}")
        if x <= 0.0:
            raise NonPositiveArea(f"area #{i} must be positive, got {x!r}")
    order = sorted(range(len(values)), key=lambda i: -values[i])
    return AreaSpec(
        areas=tuple(values[i] for i in order),
        permutation=tuple(order),
    )


def classify(spec: AreaSpec, tol_eq: float = DEFAULT_TOL_EQ) -> Classification:
    """Classify realizability of the area list.

    The slack is ``sum(areas[1:]) - areas[0]``; its sign against a relative
    tolerance decides the class.  Counts 2 and 3 get their own tags since only
    their equality cases are realizable by a bounded polyhedron.
    """
    n = spec.n
    if n <= 1:
        raise UnsupportedCount(f"cannot classify {n} area(s); need at least 2")
    a = spec.areas
    slack = math.fsum(a[1:]) - a[0]
    eq_band = tol_eq * spec.total

    if n == 2:
        if abs(slack) <= eq_band:
            return Classification(Tag.TWO_FACE_FLAT, slack)
        return Classification(Tag.INFEASIBLE, slack)
    if slack < -eq_band:
        return Classification(Tag.INFEASIBLE, slack)
    if abs(slack) <= eq_band:
        return Classification(Tag.FLAT, slack)
    if n == 3:
        return Classification(Tag.TRIANGLE_ONLY, slack)
    return Classification(Tag.SOLID, slack)


def construct_flat(spec: AreaSpec, tol_eq: float = DEFAULT_TOL_EQ) -> FlatPolyhedron:
    """Build the equality-case flat polyhedron over a square of side sqrt(A1).

    The largest area becomes the top face; the rest partition the underside
    into strips of width ``A_i / sqrt(A1)``, so strip i has area ``A_i``.
    """
    cls = classify(spec, tol_eq)
    if cls.tag not in (Tag.FLAT, Tag.TWO_FACE_FLAT):
        raise NotFlat(f"flat construction needs exact equality; got {cls.tag.value}"
                      f" with slack {cls.slack:g}")
    side = math.sqrt(spec.areas[0])
    widths = tuple(x / side for x in spec.areas[1:])
    return FlatPolyhedron(side=side, strip_widths=widths, top_face_area=spec.areas[0])
