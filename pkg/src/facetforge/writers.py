"""Mesh (OFF/OBJ), JSON report, and residual CSV output.

All numeric output is written with 17 significant digits so that re-parsing
reproduces the values bit for bit and identical runs produce identical files.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ParseError
from .feasibility import FlatPolyhedron
from .geometry import Polyhedron


def _fg(x: float) -> str:
    return f"{float(x):.17g}"


def mesh_arrays(poly: Polyhedron) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Vertices and present-facet cycles in sorted-area facet order."""
    faces = [cycle for _, cycle in poly.facets if cycle]
    return poly.vertices, faces


def flat_mesh_arrays(flat: FlatPolyhedron) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Degenerate two-sided mesh for the equality case.

    The top face is the full square (normal +z); the underside is covered by
    the strips, wound the other way (normal -z).  Zero volume by design; many
    viewers reject it, hence the CLI gates it behind a flag.
    """
    s = flat.side
    cuts = [0.0]
    for w in flat.strip_widths:
        cuts.append(cuts[-1] + w)
    cuts[-1] = s  # widths sum to the side; pin the last cut exactly
    m = len(cuts)
    verts = np.zeros((2 * m, 3))
    for i, y in enumerate(cuts):
        verts[i] = (0.0, y, 0.0)
        verts[m + i] = (s, y, 0.0)
    top = (0, m, 2 * m - 1, m - 1)  # CCW seen from +z
    faces: list[tuple[int, ...]] = [top]
    for i in range(m - 1):
        faces.append((i, i + 1, m + i + 1, m + i))  # CCW seen from -z
    return verts, faces


def _edge_count(faces) -> int:
    edges = set()
    for cycle in faces:
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            edges.add((a, b) if a < b else (b, a))
    return len(edges)


def write_off(vertices: np.ndarray, faces, path) -> None:
    lines = ["OFF", f"{len(vertices)} {len(faces)} {_edge_count(faces)}"]
    for v in vertices:
        lines.append(" ".join(_fg(c) for c in v))
    for cycle in faces:
        lines.append(str(len(cycle)) + " " + " ".join(str(i) for i in cycle))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_obj(vertices: np.ndarray, faces, path) -> None:
    lines = []
    for v in vertices:
        lines.append("v " + " ".join(_fg(c) for c in v))
    for cycle in faces:
        lines.append("f " + " ".join(str(i + 1) for i in cycle))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_mesh(poly: Polyhedron, fmt: str, path) -> None:
    """Write the polyhedron as OFF or OBJ, facets ordered by input normal."""
    vertices, faces = mesh_arrays(poly)
    if fmt == "off":
        write_off(vertices, faces, path)
    elif fmt == "obj":
        write_obj(vertices, faces, path)
    else:
        raise ValueError(f"unknown mesh format {fmt!r}")


def read_off(path) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens or tokens[0] != "OFF":
        raise ParseError(f"{path}: missing OFF header")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    verts = np.array([[float(tokens[pos + 3 * i + j]) for j in range(3)]
                      for i in range(nv)])
    pos += 3 * nv
    faces = []
    for _ in range(nf):
        count = int(tokens[pos])
        faces.append(tuple(int(t) for t in tokens[pos + 1:pos + 1 + count]))
        pos += 1 + count
    return verts, faces


def read_obj(path) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    verts = []
    faces = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append(tuple(int(x) - 1 for x in parts[1:]))
    return np.array(verts), faces


def dumps_report(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 digits."""
    out: list[str] = []
    _emit(obj, out, 0)
    return "".join(out) + "\n"


def _emit(obj, out: list[str], depth: int) -> None:
    pad = "  " * depth
    inner = "  " * (depth + 1)
    if obj is None:
        out.append("null")
    elif obj is True or obj is False:
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            raise ValueError(f"cannot serialize non-finite value {x!r}")
        out.append(_fg(x))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(f"{inner}{json.dumps(str(key))}: ")
            _emit(value, out, depth + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(items):
            out.append(inner)
            _emit(value, out, depth + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_report(report))


def write_residual_csv(history, path) -> None:
    with open(path, "w") as fh:
        fh.write("iteration,max_rel_error\n")
        for i, r in enumerate(history):
            fh.write(f"{i},{_fg(r)}\n")
