"""Brute-force oracles and planted-instance generators used by the tests.

Nothing here reuses the production search machinery: answers come from
exhaustive enumeration over explicit point grids checked with the
free-space decision procedure, or from constructions whose validity is
guaranteed geometrically.  Solver data types (instance, configuration)
are imported for their shape only, so oracle verdicts stay independent
of the code they are meant to judge.

All grid oracles are one-sided: a found curve proves feasibility, while
an exhausted grid only rules out witnesses with grid vertices.  Every
call site must spell out which direction it relies on.
"""

from __future__ import annotations

import itertools
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .config import Configuration, PartitionFn
from .discretize import GridCell
from .errors import TooLarge
from .frechet import PolygonalCurve, free_space_decision, frechet_distance, \
    pad_curve
from .geom import Segment
from .twophase import QInstance

GRID_CAP = 10 ** 6
TUPLE_CAP = 10 ** 7
FILTER_TOL = 1e-9


def _axis_values(lo: float, hi: float, r: float) -> np.ndarray:
    k0 = int(math.ceil(lo / r - 1e-12))
    k1 = int(math.floor(hi / r + 1e-12))
    return np.arange(k0, k1 + 1, dtype=float) * r


def _grid_points(lo: np.ndarray, hi: np.ndarray, r: float,
                 cap: int) -> np.ndarray:
    """Origin-anchored grid (integer multiples of r) covering the box."""
    axes = [_axis_values(lo[k], hi[k], r) for k in range(len(lo))]
    total = 1
    for ax in axes:
        total *= int(ax.size)
    if total > cap:
        raise TooLarge("grid of %d points exceeds the cap %d" % (total, cap))
    if total == 0:
        return np.zeros((0, len(lo)))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _dists_to_curve(pts: np.ndarray, tau: PolygonalCurve) -> np.ndarray:
    # nearest-point distance to the polyline, vectorized per edge
    best = np.linalg.norm(pts - tau.vertices[0], axis=1)
    for j in range(tau.m - 1):
        a = tau.vertices[j]
        e = tau.vertices[j + 1] - a
        ee = float(e @ e)
        if ee <= 0.0:
            continue
        t = np.clip((pts - a) @ e / ee, 0.0, 1.0)
        cand = np.linalg.norm(pts - (a + t[:, None] * e), axis=1)
        np.minimum(best, cand, out=best)
    return best


def brute_force_Q(inst: QInstance,
                  grid_resolution: float) -> Optional[PolygonalCurve]:
    """Exhaustive grid search for a feasible curve with at most two vertices.

    Vertices range over integer multiples of the resolution inside the
    bounding box of the smallest-threshold curve inflated by twice that
    threshold.  A returned curve passes the exact decision at every
    threshold, so it proves feasibility outright; None only certifies
    that no curve with grid vertices is feasible at this resolution.
    """
    if inst.ell > 2:
        raise TooLarge("oracle handles ell <= 2 only")
    if grid_resolution <= 0.0:
        raise ValueError("grid resolution must be positive")
    thr = np.asarray(inst.thresholds, dtype=float)
    base = inst.curves[int(np.argmin(thr))]
    pad = 2.0 * float(thr.min())
    pts = _grid_points(base.vertices.min(axis=0) - pad,
                       base.vertices.max(axis=0) + pad,
                       grid_resolution, GRID_CAP)
    if pts.shape[0] == 0:
        return None
    firsts = np.array([c.vertices[0] for c in inst.curves])
    lasts = np.array([c.vertices[-1] for c in inst.curves])
    ok_s = np.all(np.linalg.norm(pts[:, None, :] - firsts[None], axis=2)
                  <= thr + FILTER_TOL, axis=1)
    ok_e = np.all(np.linalg.norm(pts[:, None, :] - lasts[None], axis=2)
                  <= thr + FILTER_TOL, axis=1)

    def feasible(sig: PolygonalCurve) -> bool:
        return all(free_space_decision(sig, c, float(t))
                   for c, t in zip(inst.curves, thr))

    for p in pts[ok_s & ok_e]:
        sig = PolygonalCurve(p[None, :].copy())
        if feasible(sig):
            return sig
    if inst.ell >= 2:
        starts = pts[ok_s]
        ends = pts[ok_e]
        if starts.shape[0] * ends.shape[0] > TUPLE_CAP:
            raise TooLarge("endpoint pair count exceeds the cap")
        for a in starts:
            for b in ends:
                sig = PolygonalCurve(np.array([a, b]))
                if feasible(sig):
                    return sig
    return None


def kappa_certified_slack(grid_resolution: float) -> float:
    """Additive distance slack certified by the vertex-count oracle: half
    the diagonal of one planar grid cell."""
    return grid_resolution * math.sqrt(2.0) / 2.0


def brute_force_kappa(tau: PolygonalCurve, delta: float,
                      grid_resolution: float) -> int:
    """Minimum vertex count of a grid-vertex curve within delta plus the
    certified slack of tau.

    The returned k brackets the true minimum vertex count at delta:
    any curve achieving delta snaps onto the grid while moving by at most
    kappa_certified_slack(grid_resolution), so no curve with fewer than k
    vertices achieves delta, and some real curve with k vertices achieves
    delta plus that slack.
    """
    if tau.d != 2 or tau.m > 8:
        raise TooLarge("oracle handles d == 2 and m <= 8 only")
    if delta < 0.0 or grid_resolution <= 0.0:
        raise ValueError("need delta >= 0 and a positive resolution")
    bound = delta + kappa_certified_slack(grid_resolution)
    pad = bound + grid_resolution
    pts = _grid_points(tau.vertices.min(axis=0) - pad,
                       tau.vertices.max(axis=0) + pad,
                       grid_resolution, GRID_CAP)
    dt = _dists_to_curve(pts, tau)
    tube = pts[dt <= bound + FILTER_TOL]
    ds = np.linalg.norm(tube - tau.vertices[0], axis=1)
    de = np.linalg.norm(tube - tau.vertices[-1], axis=1)
    starts = tube[ds <= bound + FILTER_TOL]
    starts = starts[np.argsort(np.linalg.norm(
        starts - tau.vertices[0], axis=1), kind="stable")]
    ends = tube[de <= bound + FILTER_TOL]
    ends = ends[np.argsort(np.linalg.norm(
        ends - tau.vertices[-1], axis=1), kind="stable")]

    # single point: must sit within bound of every vertex of tau
    far = np.linalg.norm(tube[:, None, :] - tau.vertices[None], axis=2)
    one = tube[far.max(axis=1) <= bound + FILTER_TOL]
    for p in one:
        if free_space_decision(PolygonalCurve(p[None, :].copy()), tau, bound):
            return 1

    for k in range(2, tau.m + 1):
        mids = tube.shape[0] ** (k - 2)
        if starts.shape[0] * mids * ends.shape[0] > TUPLE_CAP:
            raise TooLarge("candidate tuple count exceeds the cap at k=%d"
                           % k)
        for a in starts:
            for mid in itertools.product(tube, repeat=k - 2):
                for b in ends:
                    sig = PolygonalCurve(np.array([a, *mid, b]))
                    if free_space_decision(sig, tau, bound):
                        return k
    raise AssertionError("snapped input curve must be feasible at m")


class PlantedInstance(NamedTuple):
    instance: QInstance
    witness: PolygonalCurve
    configuration: Configuration


def _sample_ball(rng: np.random.Generator, d: int, radius: float
                 ) -> np.ndarray:
    if radius <= 0.0:
        return np.zeros(d)
    v = rng.normal(0.0, 1.0, d)
    nn = float(np.linalg.norm(v))
    if nn <= 1e-12:
        return np.zeros(d)
    return v / nn * radius * float(rng.uniform()) ** (1.0 / d)


def plant_instance(l_star: int, n: int, m: int, d: int,
                   deltas: Sequence[float], noise: float,
                   seed: int = 0, eps: float = 0.5) -> PlantedInstance:
    """Feasibility instance with a known witness curve and a witness
    configuration recorded alongside.

    The witness vertices sit on the grid of step eps*delta_min/4, so the
    grid oracle at that resolution finds a solution whenever it may.  Each
    input curve samples the witness at monotone parameters that include
    every witness vertex, then perturbs each sample inside a ball of
    radius min(noise, 0.95*delta_i); matched parameters make the distance
    bound exact, not just probable.  The recorded configuration anchors
    every output vertex in its own grid cell, which keeps each witness
    vertex inside the corresponding constructed locus.
    """
    if l_star < 1:
        raise ValueError("l_star must be >= 1")
    if n < 1 or len(deltas) != n:
        raise ValueError("need one threshold per curve")
    if m < max(2, l_star):
        raise ValueError("m must be at least max(2, l_star)")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if noise < 0.0:
        raise ValueError("noise must be non-negative")
    thr = np.asarray(deltas, dtype=float)
    if not np.all(thr > 0.0) or not np.all(np.isfinite(thr)):
        raise ValueError("thresholds must be positive and finite")
    rng = np.random.default_rng(seed)
    dmin = float(thr.min())
    dmax = float(thr.max())
    snap = eps * dmin / 4.0
    step = 4.0 * dmax

    w = [snap * np.round(rng.uniform(-step, step, d) / snap)]
    for _ in range(l_star - 1):
        while True:
            v = rng.normal(0.0, 1.0, d)
            nn = float(np.linalg.norm(v))
            if nn <= 1e-12:
                continue
            cand = snap * np.round((w[-1] + v / nn * step) / snap)
            if float(np.linalg.norm(cand - w[-1])) >= 2.0 * dmax:
                break
        w.append(cand)
    W = np.array(w)
    sigma = PolygonalCurve(W.copy())

    if l_star == 1:
        sparams = np.zeros(1)
    else:
        seglen = np.linalg.norm(np.diff(W, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seglen)])
        sparams = cum / cum[-1]

    curves: List[PolygonalCurve] = []
    partitions: List[PartitionFn] = []
    for i in range(n):
        amp = min(noise, 0.95 * float(thr[i]))
        # tagged samples: every witness vertex, plus strictly interior
        # extras; the slot of an interior sample is the edge index plus one
        items: List[Tuple[float, int, np.ndarray]] = [
            (float(sparams[k]), k, W[k]) for k in range(l_star)]
        for _ in range(m - l_star):
            if l_star == 1:
                items.append((0.0, 0, W[0]))
                continue
            k = int(rng.integers(0, l_star - 1))
            frac = float(rng.uniform(0.15, 0.85))
            t = sparams[k] + frac * (sparams[k + 1] - sparams[k])
            items.append((float(t), k + 1, W[k] + frac * (W[k + 1] - W[k])))
        items.sort(key=lambda it: (it[0], it[1]))
        verts = np.array([pos + _sample_ball(rng, d, amp)
                          for _, _, pos in items])
        curves.append(PolygonalCurve(verts))
        partitions.append(PartitionFn(l_star,
                                      tuple(slot for _, slot, _ in items)))

    inst = QInstance(curves=curves, thresholds=[float(t) for t in thr],
                     ell=l_star, eps=eps)

    side = eps * dmin / (4.0 * math.sqrt(d))

    def cell_of(x: np.ndarray) -> GridCell:
        return GridCell(tuple(int(math.floor(xx / side + 1e-9)) for xx in x),
                        side)

    anchors = tuple(cell_of(wk) for wk in W)
    half = side / 4.0
    e0 = np.zeros(d)
    e0[0] = 1.0
    segments = tuple(Segment(wk - half * e0, wk + half * e0) for wk in W)
    cfg = Configuration(
        l=l_star, eps=eps / (4.0 * math.sqrt(d)),
        partitions=tuple(partitions),
        cell_pairs=tuple((anchors[k], anchors[k + 1])
                         for k in range(l_star - 1)),
        segments=segments,
        segment_keys=tuple((k, 0) for k in range(l_star)),
        anchors=anchors)

    for c, t in zip(inst.curves, thr):
        assert free_space_decision(sigma, c, float(t))
    return PlantedInstance(inst, sigma, cfg)


class PlantedClusters(NamedTuple):
    curves: List[PolygonalCurve]
    centers: List[PolygonalCurve]
    assignment: List[int]
    cost: float


def plant_clusters(k: int, n_per: int, ell: int = 2, m: int = 4,
                   d: int = 2, separation: float = 1.0,
                   noise: float = 0.05, seed: int = 0) -> PlantedClusters:
    """Well-separated clusters of noisy copies of k center curves.

    Centers are laid out along the first axis with gaps of at least
    `separation` between cluster bounding boxes; separation must be at
    least ten times the noise radius so the returned assignment is the
    true nearest-center assignment.  The reported cost re-measures every
    curve against its generating center with the distance solver.
    """
    if k < 1 or n_per < 1 or ell < 1 or m < ell or d < 1:
        raise ValueError("bad cluster shape parameters")
    if noise < 0.0 or separation <= 0.0:
        raise ValueError("noise and separation must be non-negative")
    if separation < 10.0 * noise:
        raise ValueError("separation must be at least 10x the noise radius")
    rng = np.random.default_rng(seed)
    centers: List[PolygonalCurve] = []
    cursor = 0.0
    for _ in range(k):
        pts = [rng.uniform(-1.0, 1.0, d)]
        for _ in range(ell - 1):
            v = rng.normal(0.0, 1.0, d)
            nn = float(np.linalg.norm(v))
            if nn <= 1e-12:
                v = np.zeros(d)
                v[0] = 1.0
                nn = 1.0
            pts.append(pts[-1] + v / nn * float(rng.uniform(0.5, 1.5)))
        V = np.array(pts)
        V[:, 0] += cursor - V[:, 0].min()
        cursor = V[:, 0].max() + separation + 2.0 * noise
        centers.append(PolygonalCurve(V))

    curves: List[PolygonalCurve] = []
    assignment: List[int] = []
    for j, c in enumerate(centers):
        base = pad_curve(c, m).vertices
        for _ in range(n_per):
            off = np.array([_sample_ball(rng, d, noise)
                            for _ in range(m)])
            curves.append(PolygonalCurve(base + off))
            assignment.append(j)

    total = sum(frechet_distance(centers[a], t, tol=1e-9).value
                for a, t in zip(assignment, curves))
    return PlantedClusters(curves, centers, assignment, float(total))
