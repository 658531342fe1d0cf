import numpy as np
import pytest

import facetforge as ff
from facetforge.errors import NoConvergence
from facetforge.lift import _system_from_vectors
from facetforge.minkowski import _State, _descent_steps, _gauge_projector

from _helpers import match_point_sets, random_rotation, random_solid_spec, run_full_pipeline

CUBE_NORMALS = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0],
                         [0, -1, 0], [0, 0, 1], [0, 0, -1]], float)


def cube_system():
    return _system_from_vectors(CUBE_NORMALS.copy(), mode="half-fold")


@pytest.fixture(scope="module")
def octo_system():
    spec = ff.make_area_spec([9, 6, 5, 4, 3, 2, 1, 1])
    radius, inside = ff.solve_radius(spec)
    return ff.half_fold(ff.layout_polygon(spec, radius, inside), 4)


def test_cube_solution_is_half_unit():
    sol = ff.solve_minkowski(cube_system())
    np.testing.assert_allclose(sol.h.values, 0.5, atol=1e-12)
    assert sol.residual <= 1e-12
    assert sol.poly.volume == pytest.approx(1.0, rel=1e-12)


def test_square_fold_gives_unit_area_tetrahedron():
    spec = ff.make_area_spec([1, 1, 1, 1])
    radius, inside = ff.solve_radius(spec)
    system = ff.half_fold(ff.layout_polygon(spec, radius, inside), 2)
    sol = ff.solve_minkowski(system)
    assert len(sol.poly.vertices) == 4
    np.testing.assert_allclose(sol.poly.facet_areas, 1.0, rtol=1e-7)


def test_solution_poly_is_freshly_recomputed(octo_system):
    sol = ff.solve_minkowski(octo_system)
    again = ff.intersect_halfspaces(sol.h.normals_ref, sol.h.values)
    np.testing.assert_array_equal(sol.poly.vertices, again.vertices)
    np.testing.assert_array_equal(sol.poly.facet_areas, again.facet_areas)


def test_origin_interior_after_solve(octo_system):
    sol = ff.solve_minkowski(octo_system)
    assert np.all(sol.h.values > 0)
    centroid = sol.poly.vertices.mean(axis=0)
    assert np.linalg.norm(centroid) <= 1e-9 * sol.poly.diameter


def test_uniqueness_up_to_translation(octo_system):
    rng = np.random.default_rng(1)
    sol1 = ff.solve_minkowski(octo_system)
    sol2 = ff.solve_minkowski(
        octo_system,
        ff.SolveOptions(initial_support=rng.uniform(0.5, 1.5, octo_system.n)))
    # the centroid gauge already aligns the two polyhedra
    assert match_point_sets(sol1.poly.vertices, sol2.poly.vertices,
                            1e-6 * sol1.poly.diameter)


def test_scaling_covariance(octo_system):
    c = 7.3
    sol1 = ff.solve_minkowski(octo_system)
    scaled = _system_from_vectors(octo_system.vectors * c, mode="half-fold")
    sol2 = ff.solve_minkowski(scaled)
    np.testing.assert_allclose(sol2.h.values, np.sqrt(c) * sol1.h.values,
                               rtol=1e-6)


def test_rotation_equivariance(octo_system):
    rng = np.random.default_rng(42)
    rot = random_rotation(rng)
    sol1 = ff.solve_minkowski(octo_system)
    rotated = _system_from_vectors(octo_system.vectors @ rot.T, mode="half-fold")
    sol2 = ff.solve_minkowski(rotated)
    assert match_point_sets(sol1.poly.vertices @ rot.T, sol2.poly.vertices,
                            1e-6 * sol1.poly.diameter)


def test_monotone_residual_history(octo_system):
    sol = ff.solve_minkowski(octo_system)
    hist = np.array(sol.history)
    assert hist[-1] <= 1e-7
    assert hist[0] > hist[-1]


def test_rejects_invalid_system():
    spec = ff.make_area_spec([9, 6, 5, 4, 3, 2, 1, 1])
    radius, inside = ff.solve_radius(spec)
    planar = _system_from_vectors(
        ff.layout_polygon(spec, radius, inside).edge_vectors.copy(),
        mode="balanced")
    with pytest.raises(ValueError):
        ff.solve_minkowski(planar)


def test_iteration_budget_raises(octo_system):
    with pytest.raises(NoConvergence):
        ff.solve_minkowski(octo_system, ff.SolveOptions(max_iter=1, tol_area=1e-12))


def test_random_initializations_agree():
    rng = np.random.default_rng(55)
    for _ in range(8):
        spec = random_solid_spec(rng, int(rng.integers(4, 17)))
        radius, inside = ff.solve_radius(spec)
        system = ff.half_fold(ff.layout_polygon(spec, radius, inside), spec.n // 2)
        sol1 = ff.solve_minkowski(system)
        sol2 = ff.solve_minkowski(
            system, ff.SolveOptions(initial_support=rng.uniform(0.5, 1.5, spec.n)))
        assert match_point_sets(sol1.poly.vertices, sol2.poly.vertices,
                                1e-6 * sol1.poly.diameter)


def test_descent_fallback_makes_progress(octo_system):
    normals = np.asarray(octo_system.normals, float)
    targets = np.asarray(octo_system.areas, float)
    state = _State(normals, targets)
    state.set(np.ones(len(targets)),
              ff.intersect_halfspaces(normals, np.ones(len(targets))))
    phi0 = float(targets @ state.h) / state.poly.volume ** (1 / 3)
    steps = _descent_steps(state, _gauge_projector(normals), budget=10)
    phi1 = float(targets @ state.h) / state.poly.volume ** (1 / 3)
    assert steps > 0
    assert phi1 < phi0


def test_descent_reactivates_absent_facets():
    # A deliberately bad start where several target facets are cut away.
    rng = np.random.default_rng(55)
    spec = random_solid_spec(rng, 16)
    radius, inside = ff.solve_radius(spec)
    system = ff.half_fold(ff.layout_polygon(spec, radius, inside), 8)
    normals = np.asarray(system.normals, float)
    targets = np.asarray(system.areas, float)
    h0 = rng.uniform(0.5, 1.5, 16)
    state = _State(normals, targets)
    state.set(h0, ff.intersect_halfspaces(normals, h0))
    floor = 1e-12 * targets.sum()
    assert np.any(state.areas <= floor)
    steps = _descent_steps(state, _gauge_projector(normals), budget=200,
                           stop_when_present=floor)
    assert steps > 0
    assert np.all(state.areas > floor)


def test_verify_solution_passes_and_detects_perturbation(octo_system):
    sol = ff.solve_minkowski(octo_system)
    report = ff.verify_solution(sol, octo_system)
    assert report.passed
    assert report.max_rel_area_error <= 1e-7

    bad_h = sol.h.values * (1.0 + 0.01 * np.arange(octo_system.n) / octo_system.n)
    bad = ff.MinkowskiSolution(
        h=ff.SupportVector(values=bad_h, normals_ref=sol.h.normals_ref),
        poly=sol.poly, residual=sol.residual, iterations=sol.iterations)
    bad_report = ff.verify_solution(bad, octo_system)
    assert not bad_report.areas_ok
    assert not bad_report.passed
    assert max(bad_report.rel_area_errors) > 1e-3


def test_verify_cube_exact():
    sol = ff.solve_minkowski(cube_system())
    report = ff.verify_solution(sol, cube_system())
    assert report.passed
    assert report.max_rel_area_error <= 1e-12


def test_balanced_lift_solves_too():
    spec = ff.make_area_spec([5, 4, 3, 3, 2, 1])
    radius, inside = ff.solve_radius(spec)
    system = ff.balanced_spins(ff.layout_polygon(spec, radius, inside), seed=3)
    sol = ff.solve_minkowski(system)
    assert ff.verify_solution(sol, system).passed


def test_full_pipeline_collection():
    rng = np.random.default_rng(2)
    for _ in range(6):
        spec = random_solid_spec(rng, int(rng.integers(4, 25)))
        *_, solution, report = run_full_pipeline(spec)
        assert report.passed
        assert solution.residual <= 1e-7
