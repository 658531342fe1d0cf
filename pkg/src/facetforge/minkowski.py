"""Damped Newton solve of the discrete Minkowski problem.

Given target facet areas and unit normals that are equilibrated and span
space, there is a unique (up to translation) convex polyhedron realizing
them.  This module finds its support numbers h by Newton iteration on the
area residual A(h) - A_target, using the analytic area Jacobian, with:

* translation gauge fixing: every step is projected off the 3-dimensional
  null space h -> h + (n_i . t) generated by translations;
* step damping: a trial step is rejected (and the scale halved) when it
  empties the interior, collapses a facet with a positive target, or fails
  to shrink the residual;
* a gradient-descent phase on the scale-invariant functional
  sum(A_target_i h_i) / V(h)^(1/3), whose stationary points realize areas
  proportional to the targets.  It runs whenever a target facet is absent
  (the gradient pulls absent planes back onto the polyhedron, where Newton
  has no information) and as a fallback when Newton rejects 20 consecutive
  trial steps;
* an exact final rescale h *= sqrt(sum targets / sum areas), which is exact
  because areas are quadratic under uniform scaling.

On success the returned support numbers put the vertex centroid at the
origin, so they are all positive and two solves of the same system agree up
to roundoff rather than up to translation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyInterior,
    DegenerateCombinatorics,
    FacetCollapse,
    FacetForgeError,
    InternalGeometryError,
    NoConvergence,
    UnboundedRegion,
)
from .geometry import (
    Polyhedron,
    SupportVector,
    area_jacobian,
    intersect_halfspaces,
    measure,
    positively_spans,
)
from .lift import EquilibratedSystem, validate_system

logger = logging.getLogger(__name__)

DAMPING_FLOOR = 1e-6
COLLAPSE_RTOL = 1e-12      # facet counts as collapsed below this times sum(targets)
REJECTS_FOR_FALLBACK = 20
GRADIENT_STEPS = 40
RESCALE_ROUNDS = 3


@dataclass(frozen=True, eq=False)
class SolveOptions:
    tol_area: float = 1e-7   # max relative facet-area error at convergence
    max_iter: int = 200
    damping: float = 1.0
    initial_support: np.ndarray | None = None  # default: all ones

    def __post_init__(self):
        if self.tol_area <= 0.0:
            raise ValueError("tol_area must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True, eq=False)
class MinkowskiSolution:
    h: SupportVector
    poly: Polyhedron
    residual: float          # max relative area error
    iterations: int
    history: tuple[float, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class VerificationReport:
    max_rel_area_error: float
    rel_area_errors: tuple[float, ...]
    closure_norm: float
    closure_bound: float
    max_halfspace_violation: float
    volume: float
    areas_ok: bool
    closure_ok: bool
    convex_ok: bool
    euler_ok: bool

    @property
    def passed(self) -> bool:
        return self.areas_ok and self.closure_ok and self.convex_ok and self.euler_ok


class _State:
    """Mutable iterate: support numbers with their polyhedron and residual."""

    def __init__(self, normals, targets):
        self.normals = normals
        self.targets = targets
        self.h = None
        self.poly = None
        self.areas = None

    def set(self, h, poly):
        self.h = h
        self.poly = poly
        self.areas = poly.facet_areas

    @property
    def residual(self):
        return self.areas - self.targets

    @property
    def max_rel_error(self):
        return float(np.max(np.abs(self.residual) / self.targets))


def _gauge_projector(normals: np.ndarray):
    q, _ = np.linalg.qr(normals)

    def project(d):
        return d - q @ (q.T @ d)

    return project


def _try_poly(normals, h):
    try:
        return intersect_halfspaces(normals, h, assume_bounded=True)
    except (EmptyInterior, InternalGeometryError):
        return None


def _descent_steps(state: _State, project, budget: int,
                   stop_when_present: float | None = None) -> int:
    """Descend the scale-invariant functional sum(T h) / V^(1/3).

    The functional is positive wherever the interior is nonempty (closure of
    the targets forces T . h >= insphere_radius * sum T), and for an absent
    facet its gradient component is T_i / V^(1/3) > 0, so descent pulls the
    plane back onto the polyhedron.  With ``stop_when_present`` set, descent
    returns as soon as every facet area exceeds that floor.  Returns the
    number of accepted steps.
    """
    t = state.targets

    def functional(poly, h):
        return float(t @ h) / poly.volume ** (1.0 / 3.0)

    accepted = 0
    phi = functional(state.poly, state.h)
    for _ in range(budget):
        if stop_when_present is not None and np.all(state.areas > stop_when_present):
            break
        v = state.poly.volume
        grad = t / v ** (1.0 / 3.0) \
            - (float(t @ state.h) / 3.0) / v ** (4.0 / 3.0) * state.areas
        grad = project(grad)
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            break
        step = 0.1 * float(np.linalg.norm(state.h)) / gnorm
        improved = False
        for _ in range(30):
            trial = state.h - step * grad
            poly = _try_poly(state.normals, trial)
            if poly is not None:
                phi_t = functional(poly, trial)
                if phi_t < phi:
                    state.set(trial, poly)
                    phi = phi_t
                    accepted += 1
                    improved = True
                    break
            step *= 0.5
        if not improved:
            break
    logger.debug("descent accepted %d steps", accepted)
    return accepted


def solve_minkowski(sys: EquilibratedSystem,
                    opts: SolveOptions = SolveOptions()) -> MinkowskiSolution:
    """Find support numbers whose polyhedron has the system's areas.

    Starts from h = 1 (every facet present, because the normals are distinct
    points of the unit sphere and each touches its own plane).  Raises
    NoConvergence or FacetCollapse when the iteration budget or damping floor
    is exhausted.
    """
    report = validate_system(sys)
    if not report.passed:
        raise ValueError(f"system fails validation: {report}")
    normals = np.asarray(sys.normals, dtype=float)
    targets = np.asarray(sys.areas, dtype=float)
    if not positively_spans(normals):
        raise UnboundedRegion("normals do not positively span R^3")

    if opts.initial_support is not None:
        h0 = np.asarray(opts.initial_support, dtype=float)
        if h0.shape != targets.shape or np.any(h0 <= 0.0):
            raise ValueError("initial_support must be positive with one entry per facet")
    else:
        h0 = np.ones(len(targets))
    return _solve(normals, targets, h0, opts)


def _solve(normals, targets, h0, opts: SolveOptions) -> MinkowskiSolution:
    n = len(targets)
    collapse_floor = COLLAPSE_RTOL * float(targets.sum())
    project = _gauge_projector(normals)

    state = _State(normals, targets)
    poly0 = _try_poly(normals, h0)
    if poly0 is None:
        raise EmptyInterior("initial support numbers admit no interior")
    state.set(np.asarray(h0, dtype=float).copy(), poly0)

    history = [state.max_rel_error]
    alpha = opts.damping
    consecutive_rejects = 0
    iterations = 0
    collapse_blocked = False

    for round_ in range(RESCALE_ROUNDS):
        target_tol = 0.5 * opts.tol_area if round_ == 0 else opts.tol_area * 0.25
        while state.max_rel_error > target_tol:
            if iterations >= opts.max_iter:
                raise NoConvergence(
                    f"no convergence after {iterations} iterations "
                    f"(residual {state.max_rel_error:.3e})", history)
            iterations += 1

            if np.any(state.areas <= collapse_floor):
                # Newton has no information for an absent facet (its Jacobian
                # row is zero); descend until every target facet is back.
                if _descent_steps(state, project, GRADIENT_STEPS,
                                  stop_when_present=collapse_floor) == 0:
                    raise NoConvergence(
                        "could not re-activate absent target facets "
                        f"(residual {state.max_rel_error:.3e})", history)
                history.append(state.max_rel_error)
                continue

            try:
                jac = area_jacobian(normals, state.h, poly=state.poly)
            except DegenerateCombinatorics:
                _descent_steps(state, project, 4)
                history.append(state.max_rel_error)
                continue

            r = state.residual
            rnorm = float(np.linalg.norm(r))
            delta, *_ = np.linalg.lstsq(jac, -r, rcond=1e-10)
            delta = project(delta)

            accepted = False
            while alpha >= DAMPING_FLOOR:
                trial = state.h + alpha * delta
                poly = _try_poly(normals, trial)
                if poly is None:
                    collapse_blocked = False
                elif np.any(poly.facet_areas <= collapse_floor):
                    collapse_blocked = True
                elif float(np.linalg.norm(poly.facet_areas - targets)) < rnorm:
                    state.set(trial, poly)
                    accepted = True
                    break
                else:
                    collapse_blocked = False
                alpha *= 0.5
                consecutive_rejects += 1
                if consecutive_rejects >= REJECTS_FOR_FALLBACK:
                    break

            if accepted:
                alpha = min(opts.damping, alpha * 2.0)
                consecutive_rejects = 0
            else:
                if consecutive_rejects >= REJECTS_FOR_FALLBACK:
                    consecutive_rejects = 0
                    alpha = opts.damping
                    if _descent_steps(state, project, GRADIENT_STEPS) == 0:
                        raise NoConvergence(
                            "Newton stalled and the gradient fallback made no "
                            f"progress (residual {state.max_rel_error:.3e})",
                            history)
                elif alpha < DAMPING_FLOOR:
                    if collapse_blocked:
                        raise FacetCollapse(
                            "a target facet keeps collapsing at the damping floor")
                    raise NoConvergence(
                        f"step damping bottomed out (residual "
                        f"{state.max_rel_error:.3e})", history)
            history.append(state.max_rel_error)

        # Exact quadratic rescale: areas scale with the square of h.
        scale = float(np.sqrt(targets.sum() / state.areas.sum()))
        trial = state.h * scale
        poly = _try_poly(normals, trial)
        if poly is not None:
            state.set(trial, poly)
            history.append(state.max_rel_error)
        if state.max_rel_error <= opts.tol_area:
            break
    else:
        raise NoConvergence(
            f"residual {state.max_rel_error:.3e} above tol after rescale rounds",
            history)

    # Translation gauge: put the vertex centroid at the origin, which makes
    # every support number positive and the answer reproducible.
    centroid = state.poly.vertices.mean(axis=0)
    h_final = state.h - normals @ centroid
    poly = intersect_halfspaces(normals, h_final, assume_bounded=True)
    state.set(h_final, poly)
    if state.max_rel_error > opts.tol_area:
        raise NoConvergence("gauge shift degraded the residual", history)

    return MinkowskiSolution(
        h=SupportVector(values=state.h, normals_ref=normals),
        poly=state.poly,
        residual=state.max_rel_error,
        iterations=iterations,
        history=tuple(history),
    )


def verify_solution(sol: MinkowskiSolution, sys: EquilibratedSystem,
                    tol_area: float = 1e-7) -> VerificationReport:
    """Independently re-measure the solution polyhedron against the targets."""
    normals = sol.h.normals_ref
    h = sol.h.values
    poly = intersect_halfspaces(normals, h, assume_bounded=True)
    try:
        areas, volume = measure(poly)
        euler_ok = True
    except FacetForgeError:
        areas, volume = poly.facet_areas, poly.volume
        euler_ok = False

    targets = np.asarray(sys.areas, dtype=float)
    rel_errors = np.abs(areas - targets) / targets
    closure = float(np.linalg.norm(areas @ normals))
    closure_bound = 1e-8 * float(areas.sum())
    violation = float((poly.vertices @ normals.T - h[None, :]).max())
    convex_tol = 1e-9 * max(1.0, float(np.abs(h).max()))

    return VerificationReport(
        max_rel_area_error=float(rel_errors.max()),
        rel_area_errors=tuple(float(e) for e in rel_errors),
        closure_norm=closure,
        closure_bound=closure_bound,
        max_halfspace_violation=violation,
        volume=float(volume),
        areas_ok=bool(rel_errors.max() <= tol_area),
        closure_ok=closure <= closure_bound,
        convex_ok=violation <= convex_tol and volume > 0.0,
        euler_ok=euler_ok,
    )
