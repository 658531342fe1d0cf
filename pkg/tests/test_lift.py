import logging
import math

import numpy as np
import pytest

import facetforge as ff
from facetforge.errors import BadK, LiftFailed
from facetforge.lift import MAX_SPIN_RETRIES, _spin_pairs, _system_from_vectors

from _helpers import random_solid_spec


@pytest.fixture(scope="module")
def square_poly():
    spec = ff.make_area_spec([1, 1, 1, 1])
    radius, inside = ff.solve_radius(spec)
    return ff.layout_polygon(spec, radius, inside)


@pytest.fixture(scope="module")
def octo_poly():
    spec = ff.make_area_spec([9, 6, 5, 4, 3, 2, 1, 1])
    radius, inside = ff.solve_radius(spec)
    return ff.layout_polygon(spec, radius, inside)


def test_half_fold_square(square_poly):
    sys = ff.half_fold(square_poly, 2)
    assert ff.validate_system(sys).passed
    # two vectors in the yz-plane, two in the xy-plane
    x = np.abs(sys.vectors[:, 0])
    z = np.abs(sys.vectors[:, 2])
    assert np.all(x[:2] <= 1e-12)
    assert np.all(z[2:] <= 1e-12)
    assert np.linalg.norm(sys.vectors.sum(axis=0)) <= 1e-12


def test_half_fold_octo(octo_poly):
    sys = ff.half_fold(octo_poly, 4)
    assert np.linalg.norm(sys.vectors.sum(axis=0)) <= 1e-9 * 31.0
    for v in sys.vectors:
        assert min(abs(v[0]), abs(v[2])) <= 1e-10
    np.testing.assert_allclose(sorted(sys.areas), sorted((9, 6, 5, 4, 3, 2, 1, 1)),
                               rtol=1e-12)


def test_half_fold_normals_in_two_orthogonal_planes():
    rng = np.random.default_rng(17)
    for _ in range(10):
        spec = random_solid_spec(rng, int(rng.integers(4, 24)))
        radius, inside = ff.solve_radius(spec)
        poly = ff.layout_polygon(spec, radius, inside)
        for k in {2, poly.n // 2, poly.n - 2}:
            sys = ff.half_fold(poly, k)
            assert ff.validate_system(sys).passed
            for nvec in sys.normals:
                assert min(abs(nvec[0]), abs(nvec[2])) <= 1e-10


def test_half_fold_positive_z_convention(octo_poly):
    sys = ff.half_fold(octo_poly, 4)
    pts = np.cumsum(np.vstack([np.zeros(3), sys.vectors[:-1]]), axis=0)
    assert pts[:5, 2].max() > 0  # the folded run rises out of plane
    assert pts[:5, 2].min() >= -1e-12


def test_half_fold_preserves_lengths(octo_poly):
    sys = ff.half_fold(octo_poly, 3)
    drift = np.abs(sys.areas - octo_poly.edge_lengths()) / octo_poly.edge_lengths()
    assert drift.max() <= 1e-12


def test_half_fold_bad_k(octo_poly, square_poly):
    with pytest.raises(BadK):
        ff.half_fold(octo_poly, 1)
    with pytest.raises(BadK):
        ff.half_fold(octo_poly, 7)
    with pytest.raises(BadK):
        ff.half_fold(square_poly, 3)


def test_balanced_spins_square(square_poly):
    sys = ff.balanced_spins(square_poly, seed=0)
    assert sys.mode == "balanced"
    report = ff.validate_system(sys)
    assert report.passed
    assert report.third_singular_value > 1e-6


def test_balanced_spins_reproducible(octo_poly):
    a = ff.balanced_spins(octo_poly, seed=123)
    b = ff.balanced_spins(octo_poly, seed=123)
    np.testing.assert_array_equal(a.vectors, b.vectors)


def test_balanced_spins_distinct_seeds_same_lengths(octo_poly):
    a = ff.balanced_spins(octo_poly, seed=1)
    b = ff.balanced_spins(octo_poly, seed=2)
    assert not np.allclose(a.vectors, b.vectors)
    np.testing.assert_allclose(np.sort(a.areas), np.sort(b.areas), rtol=1e-12)
    for sys in (a, b):
        assert ff.validate_system(sys).passed


def test_balanced_spins_odd_count():
    rng = np.random.default_rng(5)
    spec = random_solid_spec(rng, 7)
    radius, inside = ff.solve_radius(spec)
    poly = ff.layout_polygon(spec, radius, inside)
    sys = ff.balanced_spins(poly, seed=4)
    assert ff.validate_system(sys).passed
    # the unpaired last vector stays planar
    assert abs(sys.vectors[-1][2]) <= 1e-12


def test_zero_spin_angles_stay_planar(square_poly):
    # Forcing all spin angles to zero leaves the system rank 2; the public
    # entry point must detect exactly this and retry with fresh angles.
    vectors = _spin_pairs(square_poly.edge_vectors.copy(), np.zeros(2))
    sys = _system_from_vectors(vectors, mode="balanced")
    report = ff.validate_system(sys)
    assert not report.passed
    assert not report.span_ok


def test_balanced_spins_retry_then_fail(square_poly, monkeypatch, caplog):
    # Degenerate draws trigger the retry loop; all-degenerate draws exhaust it.
    import facetforge.lift as lift_mod

    calls = {"n": 0}
    real_draw = lift_mod._draw_spin_angles

    def rigged(rng, n_pairs):
        calls["n"] += 1
        if calls["n"] == 1:
            return np.full(n_pairs, np.pi / 2)  # equal right angles: rank 2
        return real_draw(rng, n_pairs)

    monkeypatch.setattr(lift_mod, "_draw_spin_angles", rigged)
    with caplog.at_level(logging.WARNING, logger="facetforge.lift"):
        sys = ff.balanced_spins(square_poly, seed=0)
    assert ff.validate_system(sys).passed
    assert calls["n"] >= 2
    assert any("retrying" in rec.message for rec in caplog.records)

    monkeypatch.setattr(lift_mod, "_draw_spin_angles",
                        lambda rng, n_pairs: np.zeros(n_pairs))
    with pytest.raises(LiftFailed):
        ff.balanced_spins(square_poly, seed=0)


def test_validate_system_rejects_planar(octo_poly):
    sys = _system_from_vectors(octo_poly.edge_vectors.copy(), mode="balanced")
    report = ff.validate_system(sys)
    assert not report.passed
    assert not report.span_ok
    assert report.closure_ok


def test_validate_system_rejects_parallel_pair(octo_poly):
    sys = ff.half_fold(octo_poly, 4)
    vectors = sys.vectors.copy()
    vectors[1] = 2.0 * vectors[0]
    bad = _system_from_vectors(vectors, mode="half-fold")
    report = ff.validate_system(bad)
    assert not report.pairs_ok
    assert not report.passed
