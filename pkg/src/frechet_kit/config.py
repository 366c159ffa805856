"""Configuration space for the restricted curve search.

A configuration fixes everything combinatorial about a candidate output
curve with l vertices: how each input curve's vertices are split across
the output edges (one monotone slot assignment per curve), which pair of
fine-grid cells each output edge must sweep past, which candidate segment
hosts each output vertex, and an optional coarse-grid anchor cell per
vertex.  The checks in this module are exact and cheap; the solver uses
them to reject configurations before doing any real work.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .discretize import BOUNDARY_TOL, GridCell, GridSet, SegmentFamily
from .errors import BudgetExceeded, DimensionMismatch
from .frechet import PolygonalCurve, free_space_decision
from .geom import Ball, Segment, point_segment_distance, \
    segment_ball_intersection_extremes


@dataclass(frozen=True)
class PartitionFn:
    """Monotone assignment of one curve's m vertices to slots 0..l-1.

    values[0] is always 0 and the sequence is non-decreasing, so each slot
    owns a contiguous (possibly empty) run of vertices.
    """

    l: int
    values: Tuple[int, ...]

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("slot count must be >= 1")
        if not self.values:
            raise ValueError("need at least one vertex")
        if self.values[0] != 0:
            raise ValueError("first vertex must map to slot 0")
        prev = 0
        for v in self.values:
            if v < prev:
                raise ValueError("slot assignment must be non-decreasing")
            prev = v
        if prev >= self.l:
            raise ValueError("slot value out of range")

    @property
    def m(self) -> int:
        return len(self.values)

    def preimage(self, slot: int) -> Optional[Tuple[int, int]]:
        """Inclusive vertex index range assigned to slot, or None if empty."""
        lo = bisect.bisect_left(self.values, slot)
        hi = bisect.bisect_right(self.values, slot) - 1
        if lo > hi:
            return None
        return lo, hi

    def crossing_edge(self, slot: int) -> Optional[int]:
        """Index of the unique curve edge whose endpoints straddle slot.

        Edge a straddles slot when values[a] <= slot < values[a+1]; no edge
        does once the assignment has already reached past slot at the last
        vertex (slot >= values[-1])."""
        a = bisect.bisect_right(self.values, slot) - 1
        if a < 0 or a >= len(self.values) - 1:
            return None
        return a


def enumerate_partitions(m: int, l: int) -> Iterator[PartitionFn]:
    """All non-decreasing maps of m vertices to slots 0..l-1 anchored at 0.

    Lexicographic in the value tuple; count is C(m-1+l-1, l-1).
    """
    if m < 1 or l < 1:
        raise ValueError("need m >= 1 and l >= 1")
    for rest in itertools.combinations_with_replacement(range(l), m - 1):
        yield PartitionFn(l, (0,) + rest)


@dataclass(eq=False)
class Configuration:
    """One combinatorial candidate for the output curve.

    partitions: one PartitionFn per participating curve.
    cell_pairs: l-1 fine-grid cell pairs; pair j-1 is swept by output edge j
        (first cell before second along the edge).
    segments / segment_keys: host segment per output vertex and its
        (edge, line) key in the candidate family.
    anchors: l coarse-grid cells or None; first and last are never None.
    eps: the grid resolution parameter the cells were built with; the exact
        checks derive their radii from it.
    """

    l: int
    eps: float
    partitions: Tuple[PartitionFn, ...]
    cell_pairs: Tuple[Tuple[GridCell, GridCell], ...]
    segments: Tuple[Segment, ...]
    segment_keys: Tuple[Tuple[int, int], ...]
    anchors: Tuple[Optional[GridCell], ...]

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("l must be >= 1")
        if not self.partitions:
            raise ValueError("need at least one partition")
        for p in self.partitions:
            if p.l != self.l:
                raise ValueError("partition slot count disagrees with l")
        if len(self.cell_pairs) != self.l - 1:
            raise ValueError("need exactly l-1 cell pairs")
        if len(self.segments) != self.l or len(self.segment_keys) != self.l:
            raise ValueError("need exactly l segments")
        if len(self.anchors) != self.l:
            raise ValueError("need exactly l anchor entries")
        if self.anchors[0] is None or self.anchors[-1] is None:
            raise ValueError("first and last anchors must be cells")


def _corners_within(cell: GridCell, points: np.ndarray,
                    bounds: np.ndarray) -> bool:
    # True iff every corner of the cell is within bounds[i] of points[i].
    corners = cell.corners()
    dist = np.linalg.norm(corners[:, None, :] - points[None, :, :], axis=2)
    return bool(np.all(dist.max(axis=0) <= bounds + BOUNDARY_TOL))


def check_constraint3a(A1: GridCell, Al: GridCell,
                       curves: Sequence[PolygonalCurve],
                       thresholds: Sequence[float], eps: float) -> bool:
    """End anchors must hug the input endpoints.

    Every corner of A1 must lie within delta_i + 2*sqrt(d)*eps*delta_max of
    curve i's first vertex, and every corner of Al within the same bound of
    its last vertex, for every i.
    """
    thr = np.asarray(thresholds, dtype=float)
    bound = thr + 2.0 * math.sqrt(curves[0].d) * eps * float(thr.max())
    firsts = np.array([c.vertices[0] for c in curves])
    lasts = np.array([c.vertices[-1] for c in curves])
    return (_corners_within(A1, firsts, bound)
            and _corners_within(Al, lasts, bound))


def check_constraint1(cfg: Configuration, curves: Sequence[PolygonalCurve],
                      thresholds: Sequence[float]) -> bool:
    """Exact sweep check for every interior cell pair.

    For each curve i and each slot j in 1..l-1 owning vertices a..b: every
    corner-to-corner segment xy (x in the first cell, y in the second) must
    enter the ball of radius delta_i*(1+2*sqrt(d)*eps) around vertex a and
    around vertex b, and the piece of xy from the earliest point inside the
    first ball to the latest point inside the second must stay within that
    radius of the subcurve a..b in the traversal sense.
    """
    for i, (crv, delta) in enumerate(zip(curves, thresholds)):
        radius = float(delta) * (1.0 + 2.0 * math.sqrt(crv.d) * cfg.eps)
        part = cfg.partitions[i]
        for j in range(1, cfg.l):
            rng = part.preimage(j)
            if rng is None:
                continue
            a, b = rng
            c1, c2 = cfg.cell_pairs[j - 1]
            sub = crv.subcurve(a, b)
            ball_a = Ball(crv.vertices[a], radius)
            ball_b = Ball(crv.vertices[b], radius)
            for x in c1.corners():
                for y in c2.corners():
                    xy = Segment(x, y)
                    ext1 = segment_ball_intersection_extremes(xy, ball_a)
                    ext2 = segment_ball_intersection_extremes(xy, ball_b)
                    if ext1 is None or ext2 is None:
                        return False
                    probe = PolygonalCurve(np.array([ext1[0], ext2[1]]))
                    if not free_space_decision(probe, sub, radius):
                        return False
    return True


def _middle_anchor_ok(cell: GridCell, curves: Sequence[PolygonalCurve],
                      segments: List[Segment], delta_max: float) -> bool:
    # An interior anchor must meet its host segment, so cells whose spawning
    # vertex is too far from every candidate segment can never be used.
    if cell.provenance is None:
        return True
    _, i, a = cell.provenance
    v = curves[i].vertices[a]
    bound = (9.0 * math.sqrt(cell.d) * delta_max
             + cell.side * math.sqrt(cell.d) + BOUNDARY_TOL)
    return any(point_segment_distance(v, s) <= bound for s in segments)


def enumerate_configurations(curves: Sequence[PolygonalCurve],
                             thresholds: Sequence[float], l: int, eps: float,
                             grids, L: SegmentFamily,
                             budget: int = 10 ** 7) -> Iterator[Configuration]:
    """Lazily yield every structurally valid configuration.

    Deterministic order: partitions, then cell pairs, then segments, then
    anchors, each lexicographic.  End anchors are pre-filtered by the exact
    endpoint check; interior anchors offer None first, then cells that can
    plausibly meet a candidate segment.  Raises BudgetExceeded the moment
    more than `budget` configurations would be produced.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if len(curves) != len(thresholds) or not curves:
        raise ValueError("need matching non-empty curves and thresholds")
    d = curves[0].d
    for c in curves:
        if c.d != d:
            raise DimensionMismatch("curves disagree on dimension")
    g1_list, g2 = grids
    delta_max = float(max(thresholds))

    part_lists = [list(enumerate_partitions(c.m, l)) for c in curves]
    cell_list = [cell for gs in g1_list for cell in gs]
    pair_list = list(itertools.product(cell_list, cell_list))
    seg_items = list(L)

    if l == 1:
        first_ok = [c for c in g2
                    if check_constraint3a(c, c, curves, thresholds, eps)]
        last_ok = first_ok
    else:
        thr = np.asarray(thresholds, dtype=float)
        bound = thr + 2.0 * math.sqrt(d) * eps * float(thr.max())
        firsts = np.array([c.vertices[0] for c in curves])
        lasts = np.array([c.vertices[-1] for c in curves])
        first_ok = [c for c in g2 if _corners_within(c, firsts, bound)]
        last_ok = [c for c in g2 if _corners_within(c, lasts, bound)]
    seg_objects = [s for _, s in seg_items]
    middle_ok: List[Optional[GridCell]] = [None]
    if l > 2:
        middle_ok += [c for c in g2
                      if _middle_anchor_ok(c, curves, seg_objects, delta_max)]

    anchor_axes: List[List[Optional[GridCell]]] = []
    for pos in range(l):
        if pos == 0:
            anchor_axes.append(list(first_ok))
        elif pos == l - 1:
            anchor_axes.append(list(last_ok))
        else:
            anchor_axes.append(middle_ok)

    spent = 0
    for P in itertools.product(*part_lists):
        for C in itertools.product(pair_list, repeat=l - 1):
            for S in itertools.product(seg_items, repeat=l):
                for A in itertools.product(*anchor_axes):
                    if spent >= budget:
                        raise BudgetExceeded(
                            "configuration budget exhausted", spent=spent)
                    spent += 1
                    yield Configuration(
                        l=l, eps=eps, partitions=tuple(P),
                        cell_pairs=tuple(C),
                        segments=tuple(s for _, s in S),
                        segment_keys=tuple(k for k, _ in S),
                        anchors=tuple(A))
