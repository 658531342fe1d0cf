"""Exception types shared by all facetforge modules."""


class FacetForgeError(Exception):
    """Base class for every error raised by this package."""


# ---- input and precondition errors -------------------------------------

class NonPositiveArea(FacetForgeError):
    """An input area is zero or negative."""


class NonFiniteArea(FacetForgeError):
    """An input area is NaN or infinite."""


class UnsupportedCount(FacetForgeError):
    """Too few areas to classify (n <= 1)."""


class ParseError(FacetForgeError):
    """Malformed command line or input file."""


class NotFlat(FacetForgeError):
    """Flat construction requested for a non-equality input."""


class BadK(FacetForgeError):
    """Fold index outside the admissible range [2, n - 2]."""


class RadiusTooSmall(FacetForgeError):
    """Circumradius below half the longest edge; chord cannot fit."""


# ---- numerical and geometric failures ----------------------------------

class NoConvergence(FacetForgeError):
    """An iterative solve exhausted its iteration budget."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class LiftFailed(FacetForgeError):
    """Random spins never produced a valid spatial vector system."""


class InternalGeometryError(FacetForgeError):
    """A constructed object violates one of its own invariants."""


class UnboundedRegion(FacetForgeError):
    """Halfspace normals do not positively span R^3."""


class EmptyInterior(FacetForgeError):
    """Halfspace intersection has no interior point."""


class InconsistentVolume(FacetForgeError):
    """Two independent volume formulas disagree."""


class DegenerateCombinatorics(FacetForgeError):
    """Facet areas are not differentiable at this support vector."""


class FacetCollapse(FacetForgeError):
    """A facet with a positive target area vanished and damping bottomed out."""
