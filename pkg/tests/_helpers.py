"""Shared test utilities: independent oracles and random instance generators.

The brute-force vertex enumerator here is deliberately written as plain
per-triple loops, separate from the production kernel, so kernel tests have
an independent reference.
"""

import itertools

import numpy as np

import facetforge as ff


def brute_force_vertices(normals, h, feas_tol=1e-9, merge_tol=1e-9):
    """Enumerate P(h) vertices by checking every plane triple one at a time."""
    normals = np.asarray(normals, float)
    h = np.asarray(h, float)
    n = len(h)
    points = []
    for i, j, k in itertools.combinations(range(n), 3):
        mat = np.array([normals[i], normals[j], normals[k]])
        if abs(np.linalg.det(mat)) < 1e-12:
            continue
        x = np.linalg.solve(mat, np.array([h[i], h[j], h[k]]))
        if all(float(x @ normals[m]) <= h[m] + feas_tol * max(1.0, abs(h).max())
               for m in range(n)):
            points.append(x)
    merged = []
    scale = max(1.0, max(np.linalg.norm(p) for p in points)) if points else 1.0
    for p in points:
        if not any(np.linalg.norm(p - q) <= merge_tol * scale for q in merged):
            merged.append(p)
    return np.array(merged)


def match_point_sets(a, b, tol):
    """True when the two point sets are equal up to tol (bijective nearest match)."""
    if len(a) != len(b):
        return False
    from scipy.spatial import cKDTree

    d_ab, _ = cKDTree(b).query(a)
    d_ba, _ = cKDTree(a).query(b)
    return float(d_ab.max()) <= tol and float(d_ba.max()) <= tol


def random_rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_bounded_instance(rng, n):
    """Random unit normals guaranteed to positively span, with h in [0.5, 1.5].

    A rotated copy of a positively spanning seed set (tetrahedral for n < 6,
    the axis pairs otherwise) is padded with uniformly random directions.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    if n < 6:
        seed = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]],
                        float) / np.sqrt(3)
    else:
        seed = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0],
                         [0, -1, 0], [0, 0, 1], [0, 0, -1]], float)
    extra = rng.normal(size=(n - len(seed), 3))
    extra /= np.linalg.norm(extra, axis=1)[:, None]
    normals = np.vstack([seed @ random_rotation(rng).T, extra])
    h = rng.uniform(0.5, 1.5, size=n)
    return normals, h


def random_solid_spec(rng, n):
    """Log-uniform areas in [0.1, 10] rejected until classification is Solid."""
    while True:
        areas = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=n))
        spec = ff.make_area_spec(areas)
        if ff.classify(spec).tag is ff.Tag.SOLID:
            return spec


def run_full_pipeline(spec, k=None):
    """solve_radius -> layout -> half_fold -> solve -> verify, returning all stages."""
    radius, inside = ff.solve_radius(spec)
    polygon = ff.layout_polygon(spec, radius, inside)
    system = ff.half_fold(polygon, k if k is not None else spec.n // 2)
    solution = ff.solve_minkowski(system)
    report = ff.verify_solution(solution, system)
    return radius, inside, polygon, system, solution, report
