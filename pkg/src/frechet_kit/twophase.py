"""Two-phase search for a low-complexity curve close to every input curve.

The feasibility question: given curves tau_1..tau_n with per-curve
thresholds delta_i and a vertex budget ell, return a curve sigma with at
most ell vertices whose Fréchet distance to each tau_i is at most delta_i
plus the advertised slack, or certify that no curve meets the thresholds
exactly.  Phase one intersects candidate vertex loci forward along a
configuration (the gamma chain); phase two walks the chain backward
picking concrete vertices.  The top-level solver quantises candidate
vertices on a grid fine enough that an exact witness cannot be missed,
prunes prefixes with an incremental free-space reachability gate, and
re-verifies every candidate with the full free-space decision before
returning it.
"""

from __future__ import annotations

import itertools
import math
import os
import threading
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .config import Configuration, check_constraint3a
from .errors import BudgetExceeded, DimensionMismatch, EmptyInput, EmptyStep
from .frechet import PolygonalCurve, free_space_decision, njit, pad_curve
from .geom import Ball, Cylinder, Halfspace, Segment, \
    box_halfspaces, box_plus_backward_halfspace, box_plus_forward_halfspace, \
    clip_segment_convex, clip_segment_cylinder, clip_segment_halfspace, \
    clip_t_by_halfspaces, f_region, segment_ball_interval, \
    segment_box_ball_interval

GATE_TOL = 1e-9


@dataclass(eq=False)
class QInstance:
    """One feasibility problem; curves are padded to a common vertex count.

    Padding subdivides longest edges, which leaves every pairwise Fréchet
    distance unchanged.
    """

    curves: List[PolygonalCurve]
    thresholds: List[float]
    ell: int
    eps: float

    def __post_init__(self):
        if not self.curves:
            raise EmptyInput("need at least one curve")
        if len(self.curves) != len(self.thresholds):
            raise ValueError("curves and thresholds disagree in length")
        d = self.curves[0].d
        for c in self.curves:
            if c.d != d:
                raise DimensionMismatch("curves disagree on dimension")
        self.thresholds = [float(t) for t in self.thresholds]
        for t in self.thresholds:
            if not (t > 0 and math.isfinite(t)):
                raise ValueError("thresholds must be positive and finite")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if not (0.0 < self.eps < 1.0):
            raise ValueError("eps must lie in (0, 1)")
        target = max(2, max(c.m for c in self.curves))
        self.curves = [pad_curve(c, target) for c in self.curves]
        self.m = target
        self.d = d
        self.delta_max = max(self.thresholds)
        self.delta_min = min(self.thresholds)
        self.argmin_delta = self.thresholds.index(self.delta_min)


@dataclass(frozen=True)
class Abort:
    """Diagnostic outcome of a failed forward pass; never alters control flow
    beyond signalling that the configuration is dead."""

    reason: str
    index: Optional[int] = None


@dataclass(eq=False)
class GammaChain:
    """The l non-empty vertex loci produced by a successful forward pass."""

    segments: List[Segment]
    config: Configuration


def _clip_cell_box(seg: Segment, cell) -> Optional[Segment]:
    res = clip_t_by_halfspaces(seg, box_halfspaces(cell.lo, cell.hi))
    if res is None:
        return None
    return seg.subsegment(res[0], max(res[0], min(res[1], 1.0)))


def _constraint3b_ok(cfg: Configuration, inst: QInstance, upto: int) -> bool:
    """Anchored vertices among slots 0..upto-1 must admit matched points in
    traversal order on every curve edge that sweeps past them.

    Per curve edge, intersect the edge with every corner ball of each
    anchored slot's cell, then trim the interval right ends from the back so
    a non-decreasing selection exists; any empty interval is a rejection.
    """
    sqd = math.sqrt(inst.d)
    for i, crv in enumerate(inst.curves):
        bound = inst.thresholds[i] + 2.0 * sqd * cfg.eps * inst.delta_max
        vals = cfg.partitions[i].values
        for a in range(crv.m - 1):
            if vals[a] == vals[a + 1]:
                continue
            hi_slot = min(vals[a + 1], upto)
            slots = [jj for jj in range(vals[a], hi_slot)
                     if cfg.anchors[jj] is not None]
            if not slots:
                continue
            edge = Segment(crv.vertices[a], crv.vertices[a + 1])
            los, his = [], []
            for jj in slots:
                t0, t1 = 0.0, 1.0
                for corner in cfg.anchors[jj].corners():
                    iv = segment_ball_interval(edge, Ball(corner, bound))
                    if iv is None:
                        return False
                    t0 = max(t0, iv[0])
                    t1 = min(t1, iv[1])
                if t0 > t1 + 1e-12:
                    return False
                los.append(t0)
                his.append(t1)
            for r in range(len(slots) - 2, -1, -1):
                his[r] = min(his[r], his[r + 1])
            for t0, t1 in zip(los, his):
                if t0 > t1 + 1e-12:
                    return False
    return True


def forward_construct(cfg: Configuration, inst: QInstance):
    """Intersect the vertex loci gamma_1..gamma_l; Abort on the first empty
    locus or failed anchor check.

    Expects cfg to have passed the interior cell-pair sweep check already.
    """
    l = cfg.l
    eps = cfg.eps
    sqd = math.sqrt(inst.d)
    if not check_constraint3a(cfg.anchors[0], cfg.anchors[-1], inst.curves,
                              inst.thresholds, eps):
        return Abort("Constraint3aFail")
    gammas: List[Segment] = []
    for k in range(1, l + 1):
        kk = k - 1
        g: Optional[Segment] = cfg.segments[kk]
        g = Segment(g.a.copy(), g.b.copy())
        if k == 1:
            if l > 1:
                c1, c2 = cfg.cell_pairs[0]
                g = clip_segment_convex(g, f_region(c1.corners(), c2.corners()))
            if g is not None:
                g = _clip_cell_box(g, cfg.anchors[0])
        elif k == l or cfg.anchors[kk] is not None:
            prev_c2 = cfg.cell_pairs[k - 2][1]
            g = clip_segment_convex(
                g, f_region(prev_c2.corners(), gammas[kk - 1]))
            if g is not None and k < l:
                c1, c2 = cfg.cell_pairs[k - 1]
                g = clip_segment_convex(g, f_region(c1.corners(), c2.corners()))
            if g is not None:
                g = _clip_cell_box(g, cfg.anchors[kk])
        else:
            prev_c2 = cfg.cell_pairs[k - 2][1]
            c1, c2 = cfg.cell_pairs[k - 1]
            g = clip_segment_convex(
                g, f_region(prev_c2.corners(), gammas[kk - 1]))
            if g is not None:
                g = clip_segment_convex(g, f_region(c1.corners(), c2.corners()))
            for i, crv in enumerate(inst.curves):
                if g is None:
                    break
                ai = cfg.partitions[i].crossing_edge(kk)
                if ai is None:
                    continue
                vals = cfg.partitions[i].values
                edge = Segment(crv.vertices[ai], crv.vertices[ai + 1])
                radius = inst.thresholds[i] + sqd * eps * inst.delta_max
                g = clip_segment_cylinder(g, Cylinder(edge, radius))
                if g is None:
                    break
                e = edge.direction()
                if float(np.linalg.norm(e)) <= 1e-13:
                    continue
                r_anchor = inst.thresholds[i] * (1.0 + 3.0 * sqd * eps)
                if vals[ai] <= kk - 1:
                    prev_anchor = cfg.anchors[kk - 1]
                    if prev_anchor is None:
                        g = clip_segment_halfspace(g, box_plus_forward_halfspace(
                            prev_c2.lo, prev_c2.hi, e))
                    else:
                        iv = segment_box_ball_interval(
                            edge, prev_anchor.lo, prev_anchor.hi, r_anchor)
                        if iv is not None:
                            p = edge.point_at(iv[1])
                            g = clip_segment_halfspace(
                                g, Halfspace.geq(e, float(e @ p)))
                if g is None:
                    break
                if kk + 1 < vals[ai + 1]:
                    next_anchor = cfg.anchors[kk + 1]
                    if next_anchor is None:
                        g = clip_segment_halfspace(g, box_plus_backward_halfspace(
                            c2.lo, c2.hi, e))
                    else:
                        iv = segment_box_ball_interval(
                            edge, next_anchor.lo, next_anchor.hi, r_anchor)
                        if iv is not None:
                            q = edge.point_at(iv[0])
                            g = clip_segment_halfspace(
                                g, Halfspace(e, float(e @ q)))
        if g is None:
            return Abort("EmptyGamma", k)
        gammas.append(g)
        if k > 1 and (k == l or cfg.anchors[kk] is not None) \
                and not _constraint3b_ok(cfg, inst, k):
            return Abort("Constraint3bFail", k)
    return GammaChain(segments=gammas, config=cfg)


def backward_extract(chain: GammaChain) -> PolygonalCurve:
    """Pick one vertex per locus, walking backward; midpoints make the choice
    deterministic.  EmptyStep signals a bug: a forward-produced chain always
    admits a backward walk."""
    cfg = chain.config
    l = cfg.l
    u: List[Optional[np.ndarray]] = [None] * l
    u[l - 1] = chain.segments[l - 1].midpoint()
    for j in range(l - 2, -1, -1):
        c2 = cfg.cell_pairs[j][1]
        region = f_region(c2.corners(), np.array([u[j + 1]]))
        clipped = clip_segment_convex(chain.segments[j], region)
        if clipped is None:
            raise EmptyStep(j + 1)
        u[j] = clipped.midpoint()
    return PolygonalCurve(np.array(u))


def verify_candidate(sigma: PolygonalCurve, inst: QInstance,
                     slack: float) -> bool:
    """Exact acceptance test: sigma within delta_i + slack*delta_max of every
    input curve."""
    return all(
        free_space_decision(sigma, tau, delta + slack * inst.delta_max)
        for tau, delta in zip(inst.curves, inst.thresholds))


# ---------------------------------------------------------------------------
# top-level solver


class _SpendMeter:
    """Global work counter; raises once the cap is crossed so truncated
    searches can never masquerade as exhaustive ones."""

    def __init__(self, budget: int):
        self.budget = int(budget)
        self.spent = 0
        self._lock = threading.Lock()

    def add(self, k: int = 1) -> None:
        with self._lock:
            self.spent += k
            if self.spent > self.budget:
                raise BudgetExceeded("search budget exhausted",
                                     spent=self.spent)


def _balls_pairwise_meet(centers: np.ndarray, radii: np.ndarray) -> bool:
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    return bool(np.all(dist <= radii[:, None] + radii[None, :] + GATE_TOL))


@njit(cache=True)
def _quad01_nb(aa: float, bb: float, cc: float):  # pragma: no cover - jit
    # interval of t in [0,1] with aa*t^2 + 2*bb*t + cc <= 0; lo > hi = empty
    sc = max(1.0, aa, 2.0 * abs(bb), abs(cc))
    if aa <= 1e-12 * sc:
        if cc <= 1e-12 * sc:
            return 0.0, 1.0
        return 1.0, -1.0
    disc = bb * bb - aa * cc
    if disc < -1e-12 * sc * sc:
        return 1.0, -1.0
    if disc < 0.0:
        disc = 0.0
    sq = math.sqrt(disc)
    t0 = (-bb - sq) / aa
    t1 = (-bb + sq) / aa
    if t0 < 0.0:
        t0 = 0.0
    if t1 > 1.0:
        t1 = 1.0
    if t0 > t1 + 1e-12:
        return 1.0, -1.0
    return t0, t1


@njit(cache=True)
def _tops_nb(verts, bounds, p, out):  # pragma: no cover - jit
    # per curve i and edge j: parameter interval of the edge inside
    # ball(p, bounds[i])
    n, m, d = verts.shape
    for i in range(n):
        b = bounds[i]
        for j in range(m - 1):
            aa = 0.0
            bb = 0.0
            cc = -b * b
            for t in range(d):
                dv = verts[i, j + 1, t] - verts[i, j, t]
                wv = verts[i, j, t] - p[t]
                aa += dv * dv
                bb += dv * wv
                cc += wv * wv
            out[i, j, 0], out[i, j, 1] = _quad01_nb(aa, bb, cc)


@njit(cache=True)
def _start_nb(tops, out):  # pragma: no cover - jit
    # frontier after matching one output vertex to a prefix of each curve:
    # the maximal free run of cells starting at parameter zero.  Returns the
    # index of the first curve whose start is out of reach, or -1.
    n = tops.shape[0]
    m1 = tops.shape[1]
    for i in range(n):
        for j in range(m1):
            out[i, j, 0] = 1.0
            out[i, j, 1] = -1.0
        ok = False
        for j in range(m1):
            lo = tops[i, j, 0]
            hi = tops[i, j, 1]
            if lo > hi or lo > 1e-9:
                break
            out[i, j, 0] = 0.0
            out[i, j, 1] = hi
            ok = True
            if hi < 1.0 - 1e-12:
                break
        if not ok:
            return i
    return -1


@njit(cache=True)
def _advance_nb(verts, bounds, prev_pt, p, tops, reach, out):
    # pragma: no cover - jit
    # Push each curve's matched frontier through the output edge
    # prev_pt -> p.  Free-space cells are convex, so a point is reachable
    # inside a cell exactly when it dominates some entry point
    # componentwise; only the smallest entry parameter per boundary
    # matters.  Returns the index of the first curve with an empty new
    # frontier, or -1.
    n, m, d = verts.shape
    m1 = m - 1
    for i in range(n):
        b = bounds[i]
        any_cell = False
        left = np.inf
        for j in range(m1):
            out[i, j, 0] = 1.0
            out[i, j, 1] = -1.0
            blo = reach[i, j, 0]
            bhi = reach[i, j, 1]
            bottom = blo <= bhi
            has_left = left != np.inf
            if not bottom and not has_left:
                left = np.inf
                continue
            tlo = tops[i, j, 0]
            thi = tops[i, j, 1]
            if tlo <= thi:
                tmin = 0.0 if has_left else blo
                t0v = tlo if tlo > tmin else tmin
                if t0v <= thi + 1e-12:
                    out[i, j, 0] = t0v if t0v < thi else thi
                    out[i, j, 1] = thi
                    any_cell = True
            aa = 0.0
            bb = 0.0
            cc = -b * b
            for t in range(d):
                dv = p[t] - prev_pt[t]
                wv = prev_pt[t] - verts[i, j + 1, t]
                aa += dv * dv
                bb += dv * wv
                cc += wv * wv
            rlo, rhi = _quad01_nb(aa, bb, cc)
            if rlo <= rhi:
                smin = 0.0 if bottom else left
                s0 = rlo if rlo > smin else smin
                left = s0 if s0 <= rhi + 1e-12 else np.inf
            else:
                left = np.inf
        if not any_cell:
            return i
    return -1


def _lattice(lo: np.ndarray, hi: np.ndarray, side: float,
             meter: _SpendMeter) -> np.ndarray:
    """Centers of the global grid cells whose centers land in [lo, hi] (one
    cell of margin), charged to the meter before materialising."""
    d = lo.shape[0]
    k0 = np.floor(lo / side - 0.5).astype(np.int64)
    k1 = np.floor(hi / side - 0.5).astype(np.int64) + 1
    counts = [int(b - a + 1) for a, b in zip(k0, k1)]
    total = 1
    for cn in counts:
        total *= max(cn, 0)
    if total <= 0:
        return np.zeros((0, d))
    meter.add(total)
    axes = [a + np.arange(cn) for a, cn in zip(k0, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    idx = np.stack([mm.reshape(-1) for mm in mesh], axis=1)
    return (idx + 0.5) * side


def _dists_to_polyline(pts: np.ndarray, V0: np.ndarray,
                       V1: np.ndarray) -> np.ndarray:
    best = np.full(pts.shape[0], np.inf)
    for e in range(V0.shape[0]):
        dvec = V1[e] - V0[e]
        ee = float(dvec @ dvec)
        w = pts - V0[e][None, :]
        if ee <= 1e-300:
            dist = np.linalg.norm(w, axis=1)
        else:
            t = np.clip((w @ dvec) / ee, 0.0, 1.0)
            dist = np.linalg.norm(w - t[:, None] * dvec[None, :], axis=1)
        best = np.minimum(best, dist)
    return best


def _search_l(curves: Sequence[PolygonalCurve], thresholds: Sequence[float],
              l: int, eps: float, meter: _SpendMeter,
              verify_fn: Callable[[PolygonalCurve], bool],
              start_offset: int = 0, threads: int = 1
              ) -> Optional[PolygonalCurve]:
    """Search for an l-vertex candidate over one curve set.

    Candidate vertices are centers of a global grid whose cells have
    half-diagonal eta = 0.9 * (4*sqrt(d)*eps) * delta_max.  Each vertex of
    an exact witness therefore has a grid center within eta, and that
    perturbed witness passes every gate below (the per-slot distance nets at
    delta_i + eta and the exact prefix matching gates at the verification
    bound) as well as the final free-space verification.  Exhausting the
    grid hence certifies that no curve meets the thresholds exactly.
    """
    n = len(curves)
    d = curves[0].d
    m = curves[0].m
    sqd = math.sqrt(d)
    thr = np.array([float(t) for t in thresholds])
    dmax = float(thr.max())
    slack = 4.0 * sqd * eps * dmax
    eta = 0.9 * slack
    side = 2.0 * eta / sqd
    bound = thr + slack
    net_r = thr + eta + GATE_TOL

    firsts = np.array([c.vertices[0] for c in curves])
    lasts = np.array([c.vertices[-1] for c in curves])
    if not _balls_pairwise_meet(firsts, thr) \
            or not _balls_pairwise_meet(lasts, thr):
        return None

    V0 = [c.vertices[:-1] for c in curves]
    V1 = [c.vertices[1:] for c in curves]

    def ball_net(anchor_sets: List[np.ndarray]) -> np.ndarray:
        # grid centers within net_r[i] of every anchor point of every curve
        lo = np.full(d, -np.inf)
        hi = np.full(d, np.inf)
        for i, pts in enumerate(anchor_sets):
            lo = np.maximum(lo, (pts - net_r[i]).max(axis=0))
            hi = np.minimum(hi, (pts + net_r[i]).min(axis=0))
        if np.any(lo > hi):
            return np.zeros((0, d))
        cand = _lattice(lo, hi, side, meter)
        for i, pts in enumerate(anchor_sets):
            if cand.shape[0] == 0:
                break
            diff = cand[:, None, :] - pts[None, :, :]
            keep = np.all(np.linalg.norm(diff, axis=2) <= net_r[i], axis=1)
            cand = cand[keep]
        return cand

    def tube_net() -> np.ndarray:
        # grid centers within net_r[i] of every curve's polyline
        lo = np.full(d, -np.inf)
        hi = np.full(d, np.inf)
        for i, c in enumerate(curves):
            lo = np.maximum(lo, c.vertices.min(axis=0) - net_r[i])
            hi = np.minimum(hi, c.vertices.max(axis=0) + net_r[i])
        if np.any(lo > hi):
            return np.zeros((0, d))
        cand = _lattice(lo, hi, side, meter)
        for i in range(n):
            if cand.shape[0] == 0:
                break
            keep = _dists_to_polyline(cand, V0[i], V1[i]) <= net_r[i]
            cand = cand[keep]
        return cand

    if l == 1:
        net0 = ball_net([c.vertices for c in curves])
    else:
        net0 = ball_net([c.vertices[:1] for c in curves])
    if net0.shape[0] == 0:
        return None
    if l > 1:
        net_last = ball_net([c.vertices[-1:] for c in curves])
        if net_last.shape[0] == 0:
            return None
    else:
        net_last = net0
    if l > 2:
        net_mid = tube_net()
        if net_mid.shape[0] == 0:
            return None
    else:
        net_mid = np.zeros((0, d))

    def net_of(level: int) -> Tuple[int, np.ndarray]:
        if level == 0:
            return 0, net0
        if level == l - 1:
            return 1, net_last
        return 2, net_mid

    VERT = np.ascontiguousarray(np.stack([c.vertices for c in curves]))
    gate_b = bound + GATE_TOL
    tcache: dict = {}

    def tops_of(net_id: int, row: int, p: np.ndarray) -> np.ndarray:
        key = (net_id, row)
        hit = tcache.get(key)
        if hit is None:
            hit = np.empty((n, m - 1, 2))
            _tops_nb(VERT, gate_b, p, hit)
            tcache[key] = hit
        return hit

    def descend(level: int, prev_pt: np.ndarray, reach: np.ndarray, trail
                ) -> Optional[PolygonalCurve]:
        net_id, pts = net_of(level)
        meter.add(pts.shape[0])
        last = level == l - 1
        for row in range(pts.shape[0]):
            p = pts[row]
            tops = tops_of(net_id, row, p)
            out = np.empty((n, m - 1, 2))
            if _advance_nb(VERT, gate_b, prev_pt, p, tops, reach, out) >= 0:
                continue
            if last:
                if bool(np.all(out[:, -1, 1] >= 1.0 - 1e-9)):
                    meter.add(1)
                    cand = PolygonalCurve(np.array(trail + [p]))
                    if verify_fn(cand):
                        return cand
            else:
                res = descend(level + 1, p, out, trail + [p])
                if res is not None:
                    return res
        return None

    def from_root(row: int) -> Optional[PolygonalCurve]:
        meter.add(1)
        p = net0[row]
        tops = tops_of(0, row, p)
        out = np.empty((n, m - 1, 2))
        if _start_nb(tops, out) >= 0:
            return None
        if l == 1:
            if bool(np.all(out[:, -1, 1] >= 1.0 - 1e-9)):
                meter.add(1)
                cand = PolygonalCurve(p[None, :].copy())
                if verify_fn(cand):
                    return cand
            return None
        return descend(1, p, out, [p])

    total0 = net0.shape[0]
    off = start_offset % total0

    def index_at(pos: int) -> int:
        return (off + pos) % total0

    if threads <= 1:
        for pos in range(total0):
            res = from_root(index_at(pos))
            if res is not None:
                return res
        return None

    best: List = [None, math.inf]
    lock = threading.Lock()
    errors: List[BaseException] = []

    def worker(wid: int):
        try:
            for pos in range(wid, total0, threads):
                with lock:
                    if best[1] < pos:
                        return
                res = from_root(index_at(pos))
                if res is not None:
                    with lock:
                        if pos < best[1]:
                            best[0] = res
                            best[1] = pos
                    return
        except BaseException as exc:  # propagate budget errors to the caller
            with lock:
                errors.append(exc)

    ts = [threading.Thread(target=worker, args=(w,)) for w in range(threads)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    if errors:
        raise errors[0]
    return best[0]


def _resolve_threads(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("FRECHET_KIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def solve_Q(inst: QInstance, mode: str = "full", budget: int = 10 ** 7,
            deterministic: bool = True, seed: int = 0,
            threads: Optional[int] = None) -> Optional[PolygonalCurve]:
    """Return a curve with at most inst.ell vertices within
    delta_i + eps*delta_max of every input (exactly verified), or None when
    the search space was exhausted.  BudgetExceeded is a distinct outcome:
    it is raised, never silently reported as None.

    mode "full" searches over all curves at once; mode "subset5l" searches
    every subset of min(5*l, n) curves and verifies candidates against all
    n inputs at the same bound.  With deterministic=True the first success
    in enumeration order is returned regardless of thread count; otherwise
    enumeration starts at a seeded offset.
    """
    if mode not in ("full", "subset5l"):
        raise ValueError("mode must be 'full' or 'subset5l'")
    eps_int = inst.eps / (4.0 * math.sqrt(inst.d))
    meter = _SpendMeter(budget)
    nthreads = _resolve_threads(threads)
    n = len(inst.curves)

    def verify(sigma: PolygonalCurve) -> bool:
        return verify_candidate(sigma, inst, inst.eps)

    rng = np.random.default_rng(seed)
    for l in range(1, inst.ell + 1):
        offset = 0 if deterministic else int(rng.integers(0, 2 ** 31))
        if mode == "full":
            found = _search_l(inst.curves, inst.thresholds, l, eps_int, meter,
                              verify, start_offset=offset, threads=nthreads)
        else:
            found = None
            size = min(5 * l, n)
            for subset in itertools.combinations(range(n), size):
                sub_curves = [inst.curves[i] for i in subset]
                sub_thr = [inst.thresholds[i] for i in subset]
                found = _search_l(sub_curves, sub_thr, l, eps_int, meter,
                                  verify, start_offset=offset,
                                  threads=nthreads)
                if found is not None:
                    break
        if found is not None:
            assert found.m <= inst.ell
            assert verify(found)
            return found
    return None
