"""Grids and the parallel-segment family used by the configuration search.

Two grid collections are built over ball neighborhoods of the input vertices:
a fine per-curve one (cell pairs are drawn from it) and a coarse shared one
(anchor cells).  The segment family runs parallel to the edges of the curve
with the smallest threshold; candidate vertices are picked on its segments.

All grids are anchored at the coordinate origin so runs are reproducible.
Cells are closed; touching counts as intersecting (tolerance BOUNDARY_TOL).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidCurve
from .frechet import PolygonalCurve
from .geom import ConvexRegion, Segment, convex_hull

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class GridCell:
    """Closed hypercube [index*side, (index+1)*side] per axis."""

    index: Tuple[int, ...]
    side: float
    provenance: Optional[tuple] = field(default=None, compare=False, hash=False)

    @property
    def d(self) -> int:
        return len(self.index)

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.index, dtype=float) * self.side

    @property
    def hi(self) -> np.ndarray:
        return (np.array(self.index, dtype=float) + 1.0) * self.side

    def center(self) -> np.ndarray:
        return (np.array(self.index, dtype=float) + 0.5) * self.side

    def corners(self) -> np.ndarray:
        """All 2^d corner points, in lexicographic bit order."""
        d = self.d
        lo, hi = self.lo, self.hi
        out = np.empty((1 << d, d))
        for b in range(1 << d):
            for k in range(d):
                out[b, k] = hi[k] if (b >> k) & 1 else lo[k]
        return out

    def distance_to_point(self, x) -> float:
        x = np.asarray(x, dtype=float)
        nearest = np.clip(x, self.lo, self.hi)
        return float(np.linalg.norm(x - nearest))

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        return self.distance_to_point(x) <= tol


@dataclass
class GridSet:
    """Deduplicated cells of one side length, sorted by index tuple."""

    cells: List[GridCell]
    side: float

    def __post_init__(self):
        seen = {}
        for c in self.cells:
            if c.side != self.side:
                raise ValueError("cell side disagrees with grid side")
            seen.setdefault(c.index, c)
        self.cells = [seen[k] for k in sorted(seen)]
        self._index_set = set(seen)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def has_index(self, index: Tuple[int, ...]) -> bool:
        return tuple(index) in self._index_set


def grid_cells_of_ball(center, r: float, side: float,
                       provenance: Optional[tuple] = None) -> List[GridCell]:
    """All closed cells of the origin-anchored grid meeting the closed ball."""
    if side <= 0:
        raise ValueError("side must be positive")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    center = np.asarray(center, dtype=float)
    d = center.shape[0]
    los = np.floor((center - r) / side).astype(int) - 1
    his = np.floor((center + r) / side).astype(int) + 1
    axes = [np.arange(los[k], his[k] + 1) for k in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    idx = np.stack([m.ravel() for m in mesh], axis=1)
    lo = idx * side
    nearest = np.clip(center, lo, lo + side)
    dist = np.linalg.norm(nearest - center, axis=1)
    keep = idx[dist <= r + BOUNDARY_TOL]
    order = np.lexsort(keep.T[::-1]) if keep.size else []
    return [GridCell(tuple(int(v) for v in keep[i]), side, provenance)
            for i in order]


def _corner_indices(cells: Iterable[GridCell]) -> List[Tuple[int, ...]]:
    """Distinct grid-vertex indices (corner = corner_index * side)."""
    seen = set()
    for c in cells:
        d = c.d
        for b in range(1 << d):
            key = tuple(c.index[k] + ((b >> k) & 1) for k in range(d))
            seen.add(key)
    return sorted(seen)


def _clip_line_to_hull(point: np.ndarray, direction: np.ndarray,
                       hull: ConvexRegion, tol: float = 1e-9) -> Segment:
    """Clip the line {point + t*direction} to a bounded hull containing point."""
    nd = float(np.linalg.norm(direction))
    if nd <= 1e-12 or hull.halfspaces is None:
        return Segment(point, point)
    span = 0.0
    for v in hull.vertices:
        span = max(span, float(np.linalg.norm(v - point)))
    t_lo, t_hi = -span / nd - 1.0, span / nd + 1.0
    for h in hull.halfspaces:
        a = float(h.normal @ direction)
        b = h.offset - float(h.normal @ point)
        scale = 1.0 + abs(h.offset) + float(np.abs(point).sum())
        if abs(a) <= 1e-14:
            continue  # point is in the hull, parallel constraints hold
        t = b / a
        if a > 0:
            t_hi = min(t_hi, t)
        else:
            t_lo = max(t_lo, t)
    if t_lo > t_hi:
        # point itself belongs to the hull; keep the degenerate clip
        if t_lo - t_hi <= tol / nd:
            tm = 0.5 * (t_lo + t_hi)
            return Segment(point + tm * direction, point + tm * direction)
        return Segment(point, point)
    return Segment(point + t_lo * direction, point + t_hi * direction)


@dataclass
class SegmentFamily:
    """Candidate segments grouped by the source edge of the reference curve."""

    groups: List[List[Segment]]
    hulls: List[ConvexRegion]

    @property
    def segments(self) -> List[Segment]:
        return [s for g in self.groups for s in g]

    def __iter__(self):
        for a, g in enumerate(self.groups):
            for k, s in enumerate(g):
                yield (a, k), s

    def total(self) -> int:
        return sum(len(g) for g in self.groups)


def build_L(tau_min: PolygonalCurve, delta_min: float, eps: float) -> SegmentFamily:
    """Per edge a: hull of the cell corners around both endpoints, one segment
    per distinct grid vertex of the first endpoint's cells, parallel to the
    edge, clipped within the hull.  Degenerate clips kept as points."""
    if tau_min.m < 2:
        raise InvalidCurve("reference curve needs at least 2 vertices")
    if delta_min <= 0 or eps <= 0:
        raise ValueError("delta_min and eps must be positive")
    side = eps * delta_min
    groups: List[List[Segment]] = []
    hulls: List[ConvexRegion] = []
    for a in range(tau_min.m - 1):
        va, vb = tau_min.vertices[a], tau_min.vertices[a + 1]
        cells1 = grid_cells_of_ball(va, delta_min, side)
        cells2 = grid_cells_of_ball(vb, delta_min, side)
        corner_all = np.array(_corner_indices(list(cells1) + list(cells2)),
                              dtype=float) * side
        hull = convex_hull(corner_all)
        direction = vb - va
        segs = []
        for ci in _corner_indices(cells1):
            x = np.array(ci, dtype=float) * side
            segs.append(_clip_line_to_hull(x, direction, hull))
        groups.append(segs)
        hulls.append(hull)
    return SegmentFamily(groups=groups, hulls=hulls)


def build_G1(T: Sequence[PolygonalCurve], Delta: Sequence[float], eps: float,
             l: int) -> List[GridSet]:
    """Per-curve fine grids: side eps*delta_i/l, ball radius delta_i*(1+sqrt(d)*eps)."""
    if l < 1:
        raise ValueError("l must be >= 1")
    out = []
    for i, tau in enumerate(T):
        sd = math.sqrt(tau.d)
        side = eps * Delta[i] / l
        r = Delta[i] + sd * eps * Delta[i]
        seen = {}
        for a in range(tau.m):
            for cell in grid_cells_of_ball(tau.vertices[a], r, side, ("g1", i, a)):
                seen.setdefault(cell.index, cell)
        out.append(GridSet(cells=[seen[k] for k in sorted(seen)], side=side))
    return out


def build_G2(T: Sequence[PolygonalCurve], Delta: Sequence[float],
             eps: float) -> GridSet:
    """Shared coarse grid: side eps*delta_max, radius 9*sqrt(d)*delta_max."""
    delta_max = max(Delta)
    sd = math.sqrt(T[0].d)
    side = eps * delta_max
    r = 9.0 * sd * delta_max
    seen = {}
    for i, tau in enumerate(T):
        for a in range(tau.m):
            for cell in grid_cells_of_ball(tau.vertices[a], r, side, ("g2", i, a)):
                seen.setdefault(cell.index, cell)
    return GridSet(cells=[seen[k] for k in sorted(seen)], side=side)


def _cells_containing_point(p: np.ndarray, side: float,
                            tol: float = BOUNDARY_TOL) -> List[Tuple[int, ...]]:
    """Indices of all closed cells containing p (2^d of them on boundaries)."""
    d = p.shape[0]
    per_axis = []
    for k in range(d):
        f = p[k] / side
        base = math.floor(f)
        cands = {base}
        if f - base <= tol / side:
            cands.add(base - 1)
        if (base + 1) - f <= tol / side:
            cands.add(base + 1)
        per_axis.append(sorted(cands))
    out = [()]
    for k in range(d):
        out = [t + (c,) for t in out for c in per_axis[k]]
    return [tuple(t) for t in out]


def cells_on_segment(seg: Segment, side: float) -> List[Tuple[int, ...]]:
    """Indices of all closed cells of the grid touched by the segment."""
    a, b = seg.a, seg.b
    d = a.shape[0]
    ts = {0.0, 1.0}
    for k in range(d):
        lo, hi = min(a[k], b[k]), max(a[k], b[k])
        if abs(b[k] - a[k]) <= 1e-300:
            continue
        c0 = math.floor(lo / side) - 1
        c1 = math.floor(hi / side) + 2
        for c in range(c0, c1 + 1):
            t = (c * side - a[k]) / (b[k] - a[k])
            if 0.0 <= t <= 1.0:
                ts.add(t)
    ts = sorted(ts)
    found = set()
    for t in ts:
        p = a + t * (b - a)
        found.update(_cells_containing_point(p, side))
    for u, v in zip(ts[:-1], ts[1:]):
        p = a + 0.5 * (u + v) * (b - a)
        found.add(tuple(math.floor(p[k] / side) for k in range(d)))
    return sorted(found)


class Discretization:
    """Lazy grid context for one problem instance.

    The segment family is built eagerly (it is what candidates are drawn
    from); coarse and fine cells are generated on demand because full
    materialization is quadratic-to-exponential in 1/eps and only a thin,
    query-shaped slice of them can ever matter.
    """

    def __init__(self, curves: Sequence[PolygonalCurve], deltas: Sequence[float],
                 eps: float, l: int):
        if not curves:
            raise InvalidCurve("need at least one curve")
        self.curves = list(curves)
        self.deltas = [float(x) for x in deltas]
        self.eps = float(eps)
        self.l = int(l)
        self.d = curves[0].d
        self.sqrt_d = math.sqrt(self.d)
        self.delta_min = min(self.deltas)
        self.delta_max = max(self.deltas)
        self.min_idx = min(range(len(self.deltas)), key=lambda i: (self.deltas[i], i))
        self.g2_side = self.eps * self.delta_max
        self.g2_radius = 9.0 * self.sqrt_d * self.delta_max
        self.all_vertices = np.vstack([c.vertices for c in self.curves])
        self.L = build_L(self.curves[self.min_idx], self.delta_min, self.eps)

    # -- coarse grid ------------------------------------------------------

    def g2_cell(self, index: Tuple[int, ...]) -> GridCell:
        return GridCell(tuple(index), self.g2_side, ("g2",))

    def is_g2_index(self, index: Tuple[int, ...]) -> bool:
        """A coarse cell exists iff it meets some vertex's radius-9*sqrt(d)*dmax ball."""
        lo = np.array(index, dtype=float) * self.g2_side
        nearest = np.clip(self.all_vertices, lo, lo + self.g2_side)
        dist = np.linalg.norm(self.all_vertices - nearest, axis=1)
        return bool(dist.min() <= self.g2_radius + BOUNDARY_TOL)

    def g2_cells_on_segment(self, seg: Segment) -> List[GridCell]:
        out = []
        for idx in cells_on_segment(seg, self.g2_side):
            if self.is_g2_index(idx):
                out.append(self.g2_cell(idx))
        return out

    def g2_cells_in_ball(self, center, r: float) -> List[GridCell]:
        cells = grid_cells_of_ball(center, r, self.g2_side, ("g2",))
        return [c for c in cells if self.is_g2_index(c.index)]

    # -- fine grids -------------------------------------------------------

    def g1_side(self, i: int) -> float:
        return self.eps * self.deltas[i] / self.l

    def g1_radius(self, i: int) -> float:
        return self.deltas[i] + self.sqrt_d * self.eps * self.deltas[i]

    def g1_cells_in_box(self, i: int, lo, hi) -> List[GridCell]:
        """Cells of curve i's fine grid meeting both the box [lo,hi] and the
        grid's defining vertex neighborhoods."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        side = self.g1_side(i)
        r = self.g1_radius(i)
        los = np.floor((lo - BOUNDARY_TOL) / side).astype(int) - 1
        his = np.floor((hi + BOUNDARY_TOL) / side).astype(int) + 1
        axes = [np.arange(los[k], his[k] + 1) for k in range(self.d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        idx = np.stack([m.ravel() for m in mesh], axis=1)
        if idx.size == 0:
            return []
        clo = idx * side
        # meets the query box
        near_box = np.clip(clo + 0.5 * side, lo, hi)
        sel = np.ones(idx.shape[0], dtype=bool)
        for k in range(self.d):
            sel &= (clo[:, k] <= hi[k] + BOUNDARY_TOL)
            sel &= (clo[:, k] + side >= lo[k] - BOUNDARY_TOL)
        idx = idx[sel]
        clo = clo[sel]
        if idx.size == 0:
            return []
        # meets some vertex ball of curve i
        keep = np.zeros(idx.shape[0], dtype=bool)
        for a in range(self.curves[i].m):
            v = self.curves[i].vertices[a]
            nearest = np.clip(v, clo, clo + side)
            keep |= np.linalg.norm(nearest - v, axis=1) <= r + BOUNDARY_TOL
        idx = idx[keep]
        order = np.lexsort(idx.T[::-1]) if idx.size else []
        return [GridCell(tuple(int(v) for v in idx[j]), side, ("g1", i))
                for j in order]
