"""facetforge: build a closed convex polyhedron with prescribed face areas.

Pipeline: classify the area list, close the chain of edge lengths into a
cyclic polygon, lift it to an equilibrated spanning vector system, and solve
the discrete Minkowski problem for the support numbers of the polyhedron.
"""

__version__ = "0.1.0"

from .cyclic import CyclicPolygon, closure_residual, layout_polygon, solve_radius
from .feasibility import (
    AreaSpec,
    Classification,
    FlatPolyhedron,
    Tag,
    classify,
    construct_flat,
    make_area_spec,
)
from .geometry import (
    Polyhedron,
    SupportVector,
    area_jacobian,
    intersect_halfspaces,
    measure,
)
from .lift import EquilibratedSystem, balanced_spins, half_fold, validate_system
from .minkowski import (
    MinkowskiSolution,
    SolveOptions,
    solve_minkowski,
    verify_solution,
)

__all__ = [
    "AreaSpec",
    "Classification",
    "CyclicPolygon",
    "EquilibratedSystem",
    "FlatPolyhedron",
    "MinkowskiSolution",
    "Polyhedron",
    "SolveOptions",
    "SupportVector",
    "Tag",
    "area_jacobian",
    "balanced_spins",
    "classify",
    "closure_residual",
    "construct_flat",
    "half_fold",
    "intersect_halfspaces",
    "layout_polygon",
    "make_area_spec",
    "measure",
    "solve_minkowski",
    "solve_radius",
    "validate_system",
    "verify_solution",
]
