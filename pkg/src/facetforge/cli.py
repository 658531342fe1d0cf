"""Command line front end: parse areas, run the pipeline, emit artifacts.

Exit codes: 0 success (an artifact was produced), 1 usage or parse error,
2 infeasible or unrealizable input, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

from . import __version__
from .cyclic import layout_polygon, solve_radius
from .errors import (
    BadK,
    FacetForgeError,
    NonFiniteArea,
    NonPositiveArea,
    ParseError,
    UnsupportedCount,
)
from .feasibility import (
    DEFAULT_TOL_EQ,
    Tag,
    classify,
    construct_flat,
    make_area_spec,
)
from .lift import balanced_spins, half_fold
from .minkowski import SolveOptions, solve_minkowski, verify_solution
from .writers import write_mesh, write_off, write_report, write_residual_csv, flat_mesh_arrays

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_USAGE_ERRORS = (ParseError, NonPositiveArea, NonFiniteArea, UnsupportedCount, BadK)


@dataclass
class PipelineOptions:
    mode: str = "half-fold"
    k: int | None = None          # default floor(n/2)
    seed: int = 0
    tol_eq: float = DEFAULT_TOL_EQ
    tol_area: float = 1e-7
    max_iter: int = 200


@dataclass
class PipelineResult:
    outcome: str                  # "solid" | "flat" | "infeasible" | "message"
    report: dict
    message: str
    classification: object = None
    flat: object = None
    polygon: object = None
    system: object = None
    solution: object = None
    verification: object = None


def run_pipeline(raw, opts: PipelineOptions = PipelineOptions()) -> PipelineResult:
    """Classify, construct, solve, and verify; returns everything the CLI emits.

    Numerical failures raise; infeasible and unsupported-count inputs come
    back as non-"solid" outcomes so the caller can pick the exit code.
    """
    t_start = time.perf_counter()
    spec = make_area_spec(raw)
    cls = classify(spec, opts.tol_eq)

    report = {
        "schema": 1,
        "input": {
            "raw": list(map(float, raw)),
            "sorted": list(spec.areas),
            "permutation": list(spec.permutation),
            "n": spec.n,
        },
        "classification": {
            "tag": cls.tag.value,
            "slack": cls.slack,
            "tol_eq": opts.tol_eq,
        },
        "radius": None,
        "branch": None,
        "lift": None,
        "solver": None,
        "flat": None,
        "verification": None,
        "timing": {},
    }

    def finish(outcome, message, **extra):
        report["timing"]["total_s"] = time.perf_counter() - t_start
        return PipelineResult(outcome=outcome, report=report, message=message,
                              classification=cls, **extra)

    if cls.tag is Tag.INFEASIBLE:
        return finish(
            "infeasible",
            f"infeasible: the largest area exceeds the sum of the others "
            f"(slack = {cls.slack:g})")
    if cls.tag is Tag.TRIANGLE_ONLY:
        return finish(
            "message",
            "n = 3 with strict inequality is realizable only as a triangle "
            f"with side lengths {spec.areas}, not as a closed polyhedron; "
            "no artifact produced")
    if cls.tag is Tag.TWO_FACE_FLAT:
        return finish(
            "message",
            "n = 2 with equal areas is a flat two-face polyhedron (two "
            "coincident copies of any convex polygon of that area); "
            "no artifact produced")

    if cls.tag is Tag.FLAT:
        flat = construct_flat(spec, opts.tol_eq)
        report["flat"] = {
            "side": flat.side,
            "strip_widths": list(flat.strip_widths),
            "top_face_area": flat.top_face_area,
        }
        return finish(
            "flat",
            f"flat polyhedron: doubly covered square of side {flat.side:.12g}",
            flat=flat)

    # Solid: the full construction.
    t0 = time.perf_counter()
    radius, inside = solve_radius(spec)
    report["timing"]["radius_s"] = time.perf_counter() - t0
    report["radius"] = radius
    report["branch"] = "inside" if inside else "outside"
    polygon = layout_polygon(spec, radius, inside)

    if opts.mode == "half-fold":
        k = opts.k if opts.k is not None else spec.n // 2
        system = half_fold(polygon, k)
        report["lift"] = {"mode": "half-fold", "k": k, "seed": None}
    elif opts.mode == "balanced":
        system = balanced_spins(polygon, opts.seed)
        report["lift"] = {"mode": "balanced", "k": None, "seed": opts.seed}
    else:
        raise ParseError(f"unknown lift mode {opts.mode!r}")

    t0 = time.perf_counter()
    solution = solve_minkowski(system, SolveOptions(tol_area=opts.tol_area,
                                                    max_iter=opts.max_iter))
    report["timing"]["solve_s"] = time.perf_counter() - t0
    report["solver"] = {
        "iterations": solution.iterations,
        "residual": solution.residual,
        "tol_area": opts.tol_area,
        "max_iter": opts.max_iter,
    }

    verification = verify_solution(solution, system, tol_area=opts.tol_area)
    report["verification"] = {
        "passed": verification.passed,
        "max_rel_area_error": verification.max_rel_area_error,
        "closure_norm": verification.closure_norm,
        "volume": verification.volume,
    }
    if not verification.passed:
        raise FacetForgeError(f"solution failed verification: {verification}")

    return finish(
        "solid",
        f"solved: {spec.n} faces, R = {radius:.9g} ({report['branch']}), "
        f"{solution.iterations} iterations, residual {solution.residual:.3g}",
        polygon=polygon, system=system, solution=solution,
        verification=verification)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we own the codes
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="facetforge",
        description="Construct a closed convex polyhedron whose face areas "
                    "are a prescribed list of positive numbers.")
    src = p.add_argument_group("input (choose one)")
    src.add_argument("--areas", help="comma-separated list, e.g. 9,6,5,4,3,2,1,1")
    src.add_argument("--area", action="append", type=float, default=None,
                     metavar="X", help="repeatable single area")
    src.add_argument("--input", help="file: one number per line (# comments) "
                                     "or a JSON array")
    p.add_argument("--mode", choices=("half-fold", "balanced"),
                   default="half-fold", help="lift mode (default half-fold)")
    p.add_argument("--k", type=int, default=None,
                   help="fold split index, 2..n-2 (default n//2)")
    p.add_argument("--seed", type=int, default=0,
                   help="random seed for balanced mode (default 0)")
    p.add_argument("--tol-area", type=float, default=1e-7,
                   help="relative facet-area tolerance (default 1e-7)")
    p.add_argument("--tol-eq", type=float, default=DEFAULT_TOL_EQ,
                   help="relative equality tolerance for the flat case")
    p.add_argument("--max-iter", type=int, default=200,
                   help="solver iteration budget (default 200)")
    p.add_argument("--out", help="mesh output path")
    p.add_argument("--format", choices=("off", "obj"), default="off",
                   help="mesh format (default off)")
    p.add_argument("--report", help="JSON report output path")
    p.add_argument("--residual-csv", help="per-iteration residual CSV path")
    p.add_argument("--figures", metavar="DIR",
                   help="render stage figures (PNG) into DIR")
    p.add_argument("--allow-degenerate-mesh", action="store_true",
                   help="emit the zero-volume mesh for flat inputs")
    p.add_argument("--version", action="version", version=__version__)
    return p


def parse_input(args) -> list[float]:
    """Collect the raw area list from exactly one of the three sources."""
    sources = [s for s in (args.areas, args.area, args.input) if s is not None]
    if len(sources) != 1:
        raise ParseError("provide areas via exactly one of --areas, --area, --input")
    if args.area is not None:
        return list(args.area)
    if args.areas is not None:
        out = []
        for pos, tok in enumerate(args.areas.split(",")):
            tok = tok.strip()
            if not tok:
                raise ParseError(f"--areas: empty entry at position {pos}")
            try:
                out.append(float(tok))
            except ValueError:
                raise ParseError(f"--areas: bad number {tok!r} at position {pos}")
        return out
    return _parse_file(args.input)


def _parse_file(path) -> list[float]:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: bad JSON: {exc}")
        if not isinstance(data, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in data):
            raise ParseError(f"{path}: JSON input must be an array of numbers")
        return [float(x) for x in data]
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            out.append(float(body))
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad number {body!r}")
    if not out:
        raise ParseError(f"{path}: no numbers found")
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        raw = parse_input(args)
        opts = PipelineOptions(mode=args.mode, k=args.k, seed=args.seed,
                               tol_eq=args.tol_eq, tol_area=args.tol_area,
                               max_iter=args.max_iter)
        result = run_pipeline(raw, opts)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FacetForgeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    try:
        return _emit(args, result)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def _emit(args, result: PipelineResult) -> int:
    print(result.message)
    if args.report:
        write_report(result.report, args.report)

    if result.outcome == "infeasible":
        return EXIT_INFEASIBLE
    if result.outcome == "message":
        return EXIT_INFEASIBLE

    if result.outcome == "flat":
        if args.out and args.allow_degenerate_mesh:
            verts, faces = flat_mesh_arrays(result.flat)
            write_off(verts, faces, args.out)
        elif args.out:
            print("flat input: pass --allow-degenerate-mesh to write the "
                  "zero-volume mesh", file=sys.stderr)
        if args.figures:
            from .figures import render_figures
            render_figures(args.figures, flat=result.flat)
        return EXIT_OK

    if args.out:
        write_mesh(result.solution.poly, args.format, args.out)
    if args.residual_csv:
        write_residual_csv(result.solution.history, args.residual_csv)
    if args.figures:
        from .figures import render_figures
        render_figures(args.figures, polygon=result.polygon,
                       polyhedron=result.solution.poly,
                       history=result.solution.history)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
