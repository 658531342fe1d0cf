"""Matplotlib renderings of pipeline stages, written as PNG files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Circle
from mpl_toolkits.mplot3d.art3d import Poly3DCollection

from .cyclic import CyclicPolygon
from .feasibility import FlatPolyhedron
from .geometry import Polyhedron

DPI = 150


def plot_cyclic_polygon(poly: CyclicPolygon, path) -> None:
    """The closed chain inscribed in its circumcircle."""
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.add_patch(Circle((0, 0), poly.radius, fill=False, ls="--", color="0.6"))
    pts = np.vstack([poly.vertices[:, :2], poly.vertices[:1, :2]])
    ax.plot(pts[:, 0], pts[:, 1], "o-", color="tab:blue", ms=4)
    ax.plot([0], [0], "+", color="0.3", ms=10)
    lengths = poly.edge_lengths()
    for i in range(poly.n):
        mid = 0.5 * (pts[i] + pts[i + 1])
        ax.annotate(f"{lengths[i]:g}", mid, fontsize=8, ha="center",
                    color="tab:red")
    ax.set_aspect("equal")
    ax.set_title(f"chain closes at R = {poly.radius:.6g} "
                 f"(center {'inside' if poly.center_inside else 'outside'})")
    ax.margins(0.1)
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)


def plot_convergence(history, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(range(len(history)), np.maximum(history, 1e-300), "o-", ms=3)
    ax.set_xlabel("iteration")
    ax.set_ylabel("max relative area error")
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)


def plot_polyhedron(poly: Polyhedron, path) -> None:
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    rings = [poly.vertices[list(cycle)] for _, cycle in poly.facets if cycle]
    coll = Poly3DCollection(rings, alpha=0.75, facecolor="tab:blue",
                            edgecolor="k", linewidths=0.8)
    ax.add_collection3d(coll)
    lo = poly.vertices.min(axis=0)
    hi = poly.vertices.max(axis=0)
    center = 0.5 * (lo + hi)
    half = 0.55 * float((hi - lo).max())
    ax.set_xlim(center[0] - half, center[0] + half)
    ax.set_ylim(center[1] - half, center[1] + half)
    ax.set_zlim(center[2] - half, center[2] + half)
    ax.set_box_aspect((1, 1, 1))
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)


def plot_flat(flat: FlatPolyhedron, path) -> None:
    """The doubly covered square: top face outline plus the strip partition."""
    s = flat.side
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot([0, s, s, 0, 0], [0, 0, s, s, 0], "k-")
    y = 0.0
    for i, w in enumerate(flat.strip_widths):
        y += w
        if i < len(flat.strip_widths) - 1:
            ax.plot([0, s], [y, y], "b--", lw=0.8)
        ax.annotate(f"w = {w:.4g}", (s / 2, y - w / 2), ha="center", fontsize=8)
    ax.set_aspect("equal")
    ax.set_title(f"flat: square side {s:.6g}, doubly covered")
    ax.margins(0.05)
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)


def render_figures(outdir, *, polygon=None, polyhedron=None, history=None,
                   flat=None) -> list[str]:
    """Write whichever stage figures apply; returns the paths written."""
    import os

    os.makedirs(outdir, exist_ok=True)
    written = []
    if polygon is not None:
        p = os.path.join(outdir, "cyclic_polygon.png")
        plot_cyclic_polygon(polygon, p)
        written.append(p)
    if history:
        p = os.path.join(outdir, "convergence.png")
        plot_convergence(list(history), p)
        written.append(p)
    if polyhedron is not None:
        p = os.path.join(outdir, "polyhedron.png")
        plot_polyhedron(polyhedron, p)
        written.append(p)
    if flat is not None:
        p = os.path.join(outdir, "flat_strips.png")
        plot_flat(flat, p)
        written.append(p)
    return written
