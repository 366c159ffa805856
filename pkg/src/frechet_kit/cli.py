"""Command line surface: curve I/O, normalization, four subcommands.

Curve files are JSON ({"d": 2, "curves": [[[x, y], ...], ...]}) or CSV
with one curve per file, one comma-separated vertex per row.  Inputs are
scaled to unit bounding-box diameter by default (--no-normalize turns it
off); every JSON answer reports the scale factor, and distance-like
flags (--delta, --thresholds) are given in input units and scaled
internally.  Coordinates in answers map back by dividing by the scale.

Exit codes: 0 success or non-null, 2 null, 3 budget exhausted, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .cluster import kl_median
from .errors import BudgetExceeded, DimensionMismatch, EmptyInput, \
    FrechetKitError, ParseError
from .frechet import PolygonalCurve, free_space_decision, frechet_distance
from .simplify import bicriteria_simplify
from .twophase import QInstance, solve_Q

SVG_SIZE = 480
SVG_MARGIN = 24


def _collapse_duplicates(rows: List[List[float]]) -> np.ndarray:
    out = [rows[0]]
    for r in rows[1:]:
        if r != out[-1]:
            out.append(r)
    return np.array(out, dtype=float)


def _vertex_list(obj, d: int, where: str) -> List[List[float]]:
    if not isinstance(obj, list) or not obj:
        raise ParseError("%s: expected a non-empty list of vertices" % where)
    rows = []
    for j, v in enumerate(obj):
        if not isinstance(v, list):
            raise ParseError("%s, vertex %d: expected a list" % (where, j))
        if len(v) != d:
            raise DimensionMismatch(
                "%s, vertex %d: expected %d coordinates, got %d"
                % (where, j, d, len(v)))
        try:
            rows.append([float(x) for x in v])
        except (TypeError, ValueError):
            raise ParseError("%s, vertex %d: non-numeric coordinate"
                             % (where, j))
    return rows


def load_curves(path: str, format: str = "json") -> List[PolygonalCurve]:
    """Parse curves and collapse consecutive duplicate vertices."""
    if format == "json":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ParseError("%s:%d:%d: %s"
                                 % (path, e.lineno, e.colno, e.msg))
        if not isinstance(data, dict) or "d" not in data \
                or "curves" not in data:
            raise ParseError('%s: expected {"d": ..., "curves": ...}' % path)
        d = data["d"]
        if not isinstance(d, int) or d < 1:
            raise ParseError("%s: d must be a positive integer" % path)
        if not isinstance(data["curves"], list) or not data["curves"]:
            raise ParseError("%s: curves must be a non-empty list" % path)
        out = []
        for i, rows in enumerate(data["curves"]):
            pts = _vertex_list(rows, d, "%s, curve %d" % (path, i))
            out.append(PolygonalCurve(_collapse_duplicates(pts)))
        return out
    if format == "csv":
        rows: List[List[float]] = []
        width: Optional[int] = None
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                try:
                    vals = [float(x) for x in parts]
                except ValueError:
                    raise ParseError("%s:%d: non-numeric field"
                                     % (path, lineno))
                if width is None:
                    width = len(vals)
                elif len(vals) != width:
                    raise DimensionMismatch(
                        "%s:%d: expected %d fields, got %d"
                        % (path, lineno, width, len(vals)))
                rows.append(vals)
        if not rows:
            raise EmptyInput("%s: no vertices" % path)
        return [PolygonalCurve(_collapse_duplicates(rows))]
    raise ValueError("unknown format %r" % format)


def save_curves(path: str, curves: Sequence[PolygonalCurve]) -> None:
    payload = {"d": curves[0].d,
               "curves": [c.vertices.tolist() for c in curves]}
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def normalize_curves(curves: Sequence[PolygonalCurve]
                     ) -> Tuple[List[PolygonalCurve], float]:
    """Scale all curves jointly so the common bounding box has diameter 1.

    Returns the scaled curves and the scale factor applied; degenerate
    input (a single point) keeps scale 1.
    """
    allv = np.vstack([c.vertices for c in curves])
    diam = float(np.linalg.norm(allv.max(axis=0) - allv.min(axis=0)))
    scale = 1.0 / diam if diam > 0.0 else 1.0
    return ([PolygonalCurve(c.vertices * scale) for c in curves], scale)


def _xy(v: np.ndarray) -> Tuple[float, float]:
    return float(v[0]), float(v[1]) if v.shape[0] > 1 else 0.0


def emit_svg(curves: Sequence[PolygonalCurve],
             result: Optional[PolygonalCurve], path: str,
             cells: Optional[Sequence] = None) -> None:
    """Plot the first two coordinates: inputs grey, result red, optional
    grid cells light blue.  Output bytes depend only on the arguments."""
    pts = [np.atleast_2d(np.array([_xy(v) for v in c.vertices]))
           for c in curves]
    if result is not None:
        pts.append(np.array([_xy(v) for v in result.vertices]))
    allv = np.vstack(pts)
    lo = allv.min(axis=0)
    hi = allv.max(axis=0)
    span = max(float((hi - lo).max()), 1e-12)
    scale = (SVG_SIZE - 2.0 * SVG_MARGIN) / span

    def fmt(p) -> str:
        x = SVG_MARGIN + (p[0] - lo[0]) * scale
        y = SVG_SIZE - SVG_MARGIN - (p[1] - lo[1]) * scale
        return "%.3f,%.3f" % (x, y)

    def poly(vts: np.ndarray, color: str, width: float) -> str:
        if vts.shape[0] == 1:
            x, y = fmt(vts[0]).split(",")
            return ('<circle cx="%s" cy="%s" r="3" fill="%s"/>'
                    % (x, y, color))
        return ('<polyline points="%s" fill="none" stroke="%s" '
                'stroke-width="%.1f"/>'
                % (" ".join(fmt(v) for v in vts), color, width))

    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<svg xmlns="http://www.w3.org/2000/svg" width="%d" '
             'height="%d" viewBox="0 0 %d %d">'
             % (SVG_SIZE, SVG_SIZE, SVG_SIZE, SVG_SIZE)]
    for cell in cells or []:
        c0 = fmt([float(cell.lo[0]), float(cell.lo[1])]).split(",")
        c1 = fmt([float(cell.hi[0]), float(cell.hi[1])]).split(",")
        x = min(float(c0[0]), float(c1[0]))
        y = min(float(c0[1]), float(c1[1]))
        w = abs(float(c1[0]) - float(c0[0]))
        h = abs(float(c1[1]) - float(c0[1]))
        lines.append('<rect x="%.3f" y="%.3f" width="%.3f" height="%.3f" '
                     'fill="#cfe5ff" stroke="none"/>' % (x, y, w, h))
    for c in curves:
        lines.append(poly(np.array([_xy(v) for v in c.vertices]),
                          "#999999", 1.5))
    if result is not None:
        lines.append(poly(np.array([_xy(v) for v in result.vertices]),
                          "#cc0000", 2.5))
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def _cmd_dist(args) -> int:
    a = load_curves(args.a, args.format)[0]
    b = load_curves(args.b, args.format)[0]
    scale = 1.0
    if args.normalize:
        (a, b), scale = normalize_curves([a, b])
    res = frechet_distance(a, b, tol=args.tol * scale if args.normalize
                           else args.tol)
    _emit({"value": res.value, "lower": res.lower, "upper": res.upper,
           "scale": scale})
    return 0


def _cmd_simplify(args) -> int:
    tau = load_curves(args.curve, args.format)[0]
    scale = 1.0
    if args.normalize:
        (tau,), scale = normalize_curves([tau])
    delta = args.delta * scale
    blocks: List[Tuple[int, int]] = []
    try:
        sigma = bicriteria_simplify(tau, delta, args.alpha, args.eps,
                                    budget=args.budget,
                                    threads=args.threads,
                                    blocks_out=blocks)
    except BudgetExceeded as e:
        _emit({"status": "budget_exceeded", "spent": e.spent,
               "scale": scale})
        return 3
    bound = (1.0 + args.eps) * delta
    ok = free_space_decision(sigma, tau, bound)
    if args.svg:
        emit_svg([tau], sigma, args.svg)
    _emit({"vertices": sigma.vertices.tolist(),
           "frechet_check": {"bound": bound, "pass": bool(ok)},
           "blocks": [[int(s), int(e)] for s, e in blocks],
           "scale": scale})
    return 0


def _cmd_repr(args) -> int:
    curves = load_curves(args.curves, args.format)
    scale = 1.0
    if args.normalize:
        curves, scale = normalize_curves(curves)
    thr = [float(x) * scale for x in args.thresholds.split(",")]
    if len(thr) != len(curves):
        raise ParseError("expected %d thresholds, got %d"
                         % (len(curves), len(thr)))
    inst = QInstance(curves=curves, thresholds=thr, ell=args.ell,
                     eps=args.eps)
    try:
        sig = solve_Q(inst, mode=args.mode, budget=args.budget,
                      deterministic=args.seed == 0, seed=args.seed,
                      threads=args.threads)
    except BudgetExceeded as e:
        _emit({"status": "budget_exceeded", "spent": e.spent,
               "per_curve_distances": None, "scale": scale})
        return 3
    if sig is None:
        _emit({"status": "null", "per_curve_distances": None,
               "scale": scale})
        return 2
    dists = [frechet_distance(sig, c, tol=1e-9).value for c in inst.curves]
    _emit({"status": "curve", "vertices": sig.vertices.tolist(),
           "per_curve_distances": dists, "scale": scale})
    return 0


def _cmd_cluster(args) -> int:
    curves = load_curves(args.curves, args.format)
    scale = 1.0
    if args.normalize:
        curves, scale = normalize_curves(curves)
    details: dict = {}
    try:
        centers = kl_median(curves, args.k, args.ell, args.mu, args.eps,
                            seed=args.seed, budget=args.budget,
                            finder_kwargs={"threads": args.threads},
                            details=details)
    except BudgetExceeded as e:
        _emit({"status": "budget_exceeded", "spent": e.spent,
               "scale": scale})
        return 3
    assignment = []
    for c in curves:
        vals = [frechet_distance(s, c).value for s in centers]
        assignment.append(int(np.argmin(vals)))
    _emit({"centers": [s.vertices.tolist() for s in centers],
           "cost": details["cost"], "assignment": assignment,
           "provenance_flags": details["flags"], "scale": scale})
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction,
                   default=True,
                   help="scale inputs to unit bounding-box diameter")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="frechet-kit",
        description="curve simplification and clustering under the "
                    "continuous Frechet distance")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="distance between two curves")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("simplify", help="bicriteria simplification")
    p.add_argument("curve")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--budget", type=int, default=10 ** 7)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--svg")
    _add_common(p)
    p.set_defaults(func=_cmd_simplify)

    p = sub.add_parser("repr", help="shared representative curve")
    p.add_argument("curves")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--thresholds", required=True,
                   help="comma-separated, one per curve, in input units")
    p.add_argument("--mode", choices=("full", "subset5l"), default="full")
    p.add_argument("--seed", type=int, default=0,
                   help="0 runs the canonical order; other values rotate "
                        "the search order reproducibly")
    p.add_argument("--budget", type=int, default=10 ** 7)
    p.add_argument("--threads", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_repr)

    p = sub.add_parser("cluster", help="(k,l)-median clustering")
    p.add_argument("curves")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10 ** 7)
    p.add_argument("--threads", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_cluster)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FrechetKitError, ValueError, OSError) as e:
        sys.stderr.write("error: %s\n" % e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
