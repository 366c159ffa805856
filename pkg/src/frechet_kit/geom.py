"""Geometric primitives: segments, halfspaces, convex regions, clipping.

Coordinates are numpy float64 arrays.  Predicates use the module tolerance
EPS = 1e-9 (inputs are assumed to sit at roughly unit scale); the single
halfspace clip uses the tighter HS_EPS = 1e-12.  The boundary policy is
closed everywhere: touching counts as intersecting, and interval emptiness
checks err toward non-empty within tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateSegment, DimensionMismatch, EmptyInput

EPS = 1e-9
HS_EPS = 1e-12


def as_point(x) -> np.ndarray:
    p = np.asarray(x, dtype=float)
    if p.ndim != 1:
        raise ValueError("a point must be a flat coordinate sequence")
    return p


# ---------------------------------------------------------------------------
# basic types


@dataclass(eq=False)
class Segment:
    """Closed segment from a to b; degenerate (a == b) segments are allowed."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = as_point(self.a)
        self.b = as_point(self.b)
        if self.a.shape != self.b.shape:
            raise DimensionMismatch("segment endpoints disagree on dimension")

    @property
    def d(self) -> int:
        return self.a.shape[0]

    def direction(self) -> np.ndarray:
        return self.b - self.a

    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    def point_at(self, t: float) -> np.ndarray:
        return self.a + t * (self.b - self.a)

    def is_degenerate(self, tol: float = EPS) -> bool:
        return self.length() <= tol

    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.a + self.b)

    def subsegment(self, t0: float, t1: float) -> "Segment":
        return Segment(self.point_at(t0), self.point_at(t1))


@dataclass(eq=False)
class Halfspace:
    """Closed halfspace {x : normal . x <= offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = as_point(self.normal)
        self.offset = float(self.offset)

    @staticmethod
    def geq(normal, offset) -> "Halfspace":
        """Halfspace {x : normal . x >= offset} in canonical <= form."""
        n = as_point(normal)
        return Halfspace(-n, -float(offset))

    def contains(self, x, tol: float = EPS) -> bool:
        x = as_point(x)
        scale = 1.0 + abs(self.offset) + float(np.abs(x).sum())
        return float(self.normal @ x) <= self.offset + tol * scale

    def violation(self, x) -> float:
        return float(self.normal @ as_point(x)) - self.offset


@dataclass(eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = as_point(self.center)
        self.radius = float(self.radius)
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")

    def contains(self, x, tol: float = EPS) -> bool:
        return float(np.linalg.norm(as_point(x) - self.center)) <= self.radius + tol


@dataclass(eq=False)
class Cylinder:
    """Finite cylinder: points within `radius` of the axis segment's line,
    whose projection onto the axis line falls inside the segment (flat caps)."""

    axis: Segment
    radius: float

    def __post_init__(self):
        self.radius = float(self.radius)

    def contains(self, x, tol: float = EPS) -> bool:
        x = as_point(x)
        u = self.axis.direction()
        L = float(np.linalg.norm(u))
        if L <= EPS:
            return float(np.linalg.norm(x - self.axis.a)) <= self.radius + tol
        u = u / L
        z = float((x - self.axis.a) @ u)
        if z < -tol or z > L + tol:
            return False
        perp = (x - self.axis.a) - z * u
        return float(np.linalg.norm(perp)) <= self.radius + tol


@dataclass(eq=False)
class ConvexRegion:
    """Convex set given by vertices plus optional ray generators.

    The region is conv(vertices) + cone(rays).  `halfspaces` is an optional
    H-representation (exact for bounded hull outputs); `universal` marks the
    whole space, in which case the other fields are ignored.
    """

    vertices: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    rays: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    halfspaces: Optional[list] = None
    universal: bool = False

    def __post_init__(self):
        self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if self.rays is None or np.size(self.rays) == 0:
            d = self.vertices.shape[1]
            self.rays = np.zeros((0, d))
        else:
            self.rays = np.atleast_2d(np.asarray(self.rays, dtype=float))

    @property
    def d(self) -> int:
        return self.vertices.shape[1]

    def is_bounded(self) -> bool:
        return not self.universal and self.rays.shape[0] == 0

    def contains(self, x, tol: float = EPS, method: str = "auto") -> bool:
        if self.universal:
            return True
        x = as_point(x)
        if method == "hrep" or (
            method == "auto" and self.halfspaces is not None and self.rays.shape[0] == 0
        ):
            return all(h.contains(x, tol) for h in self.halfspaces)
        return _vrep_member(self.vertices, self.rays, x, tol)

    def bounding_box(self) -> tuple:
        """Axis-aligned bounding box of the vertex set (rays ignored)."""
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


UNIVERSAL = None  # sentinel replaced below once ConvexRegion exists


def universal_region(d: int) -> ConvexRegion:
    return ConvexRegion(vertices=np.zeros((1, d)), universal=True)


# ---------------------------------------------------------------------------
# dense simplex LP (min c.x s.t. A x = b, x >= 0), two-phase, Bland's rule

LP_TOL = 1e-9


def _pivot(T: np.ndarray, basis: list, row: int, col: int) -> None:
    T[row] = T[row] / T[row, col]
    colvals = T[:, col].copy()
    colvals[row] = 0.0
    T -= np.outer(colvals, T[row])
    basis[row] = col


def _bland_iterate(T: np.ndarray, basis: list, ncols: int, tol: float) -> str:
    m = T.shape[0] - 1
    for _ in range(20000):
        col = -1
        for j in range(ncols):
            if T[m, j] < -tol:
                col = j
                break
        if col < 0:
            return "optimal"
        row, best = -1, None
        for r in range(m):
            arc = T[r, col]
            if arc > tol:
                ratio = T[r, -1] / arc
                if best is None or ratio < best - 1e-14 or (
                    abs(ratio - best) <= 1e-14 and basis[r] < basis[row]
                ):
                    best, row = ratio, r
        if row < 0:
            return "unbounded"
        _pivot(T, basis, row, col)
    return "stalled"


def solve_lp(c, A, b, tol: float = LP_TOL):
    """Solve min c.x s.t. A x = b, x >= 0.

    Returns (status, x, objective) with status in
    {"optimal", "infeasible", "unbounded"}.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float)).copy()
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if b.shape != (m,):
        raise ValueError("rhs shape mismatch")
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificials with identity columns
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n, n + m))
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    status = _bland_iterate(T, basis, n + m, tol)
    scale = max(1.0, float(np.abs(b).max()) if m else 1.0)
    if status != "optimal" or -T[m, -1] > tol * scale:
        return "infeasible", None, None

    # force artificials out of the basis where possible; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            piv = -1
            for j in range(n):
                if abs(T[r, j]) > tol:
                    piv = j
                    break
            if piv >= 0:
                _pivot(T, basis, r, piv)
                keep.append(r)
            # else: redundant constraint row, drop it
        else:
            keep.append(r)
    rows = keep + [m]
    T2 = np.zeros((len(keep) + 1, n + 1))
    T2[:-1, :n] = T[keep][:, :n]
    T2[:-1, -1] = T[keep][:, -1]
    basis2 = [basis[r] for r in keep]

    # phase 2 objective row
    obj = c.astype(float).copy()
    val = 0.0
    row_of = {bi: i for i, bi in enumerate(basis2)}
    for bi, i in row_of.items():
        coef = obj[bi]
        if coef != 0.0:
            obj = obj - coef * T2[i, :n]
            val -= coef * T2[i, -1]
    T2[-1, :n] = obj
    T2[-1, -1] = val
    status = _bland_iterate(T2, basis2, n, tol)
    if status == "unbounded":
        return "unbounded", None, None
    x = np.zeros(n)
    for i, bi in enumerate(basis2):
        x[bi] = T2[i, -1]
    return "optimal", x, float(c @ x)


def _vrep_member(V: np.ndarray, R: np.ndarray, x: np.ndarray, tol: float) -> bool:
    """Feasibility of x in conv(V) + cone(R) via a phase-1 LP."""
    k, d = V.shape
    r = R.shape[0]
    A = np.zeros((d + 1, k + r))
    A[:d, :k] = V.T
    if r:
        A[:d, k:] = R.T
    A[d, :k] = 1.0
    b = np.concatenate([x, [1.0]])
    status, _, _ = solve_lp(np.zeros(k + r), A, b, tol)
    return status == "optimal"


def regions_intersect(V1: np.ndarray, V2: np.ndarray, tol: float = LP_TOL) -> bool:
    """Whether conv(V1) and conv(V2) share a point (closed test)."""
    k1, d = V1.shape
    k2 = V2.shape[0]
    A = np.zeros((d + 2, k1 + k2))
    A[:d, :k1] = V1.T
    A[:d, k1:] = -V2.T
    A[d, :k1] = 1.0
    A[d + 1, k1:] = 1.0
    b = np.concatenate([np.zeros(d), [1.0, 1.0]])
    status, _, _ = solve_lp(np.zeros(k1 + k2), A, b, tol)
    return status == "optimal"


# ---------------------------------------------------------------------------
# projection and distances


def project_onto_segment_line(x, seg: Segment):
    """Orthogonal projection of x onto the line through seg.

    Returns (point, t) with point = seg.a + t * (seg.b - seg.a).
    Raises DegenerateSegment when seg has no direction.
    """
    x = as_point(x)
    dvec = seg.direction()
    L2 = float(dvec @ dvec)
    if L2 <= EPS * EPS:
        raise DegenerateSegment("cannot project onto a zero-length segment")
    t = float((x - seg.a) @ dvec) / L2
    return seg.a + t * dvec, t


def point_segment_distance(x, seg: Segment) -> float:
    x = as_point(x)
    dvec = seg.direction()
    L2 = float(dvec @ dvec)
    if L2 <= 0.0:
        return float(np.linalg.norm(x - seg.a))
    t = float((x - seg.a) @ dvec) / L2
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(x - (seg.a + t * dvec)))


def point_box_distance(x, lo, hi) -> float:
    x = as_point(x)
    clamped = np.minimum(np.maximum(x, lo), hi)
    return float(np.linalg.norm(x - clamped))


def segment_segment_distance(s1: Segment, s2: Segment) -> float:
    """Minimum distance between two closed segments (standard clamped form)."""
    p, q = s1.a, s2.a
    u, v = s1.direction(), s2.direction()
    w = p - q
    a = float(u @ u)
    b = float(u @ v)
    c = float(v @ v)
    d = float(u @ w)
    e = float(v @ w)
    den = a * c - b * b
    if den > 1e-14:
        s = (b * e - c * d) / den
        t = (a * e - b * d) / den
    else:
        s = 0.0
        t = e / c if c > 1e-14 else 0.0
    s = min(1.0, max(0.0, s))
    # re-clamp t for this s, then s for that t
    if c > 1e-14:
        t = min(1.0, max(0.0, (e + b * s) / c))
    else:
        t = 0.0
    if a > 1e-14:
        s = min(1.0, max(0.0, (b * t - d) / a))
    return float(np.linalg.norm((p + s * u) - (q + t * v)))


def distance_to_hull(x, points: np.ndarray, iters: int = 300, gap_tol: float = 1e-12):
    """Distance from x to conv(points) by Frank-Wolfe with a duality gap.

    Returns (upper, lower): certified bounds on the true distance.  Callers
    that prune on distance must use `lower` to stay sound.
    """
    x = as_point(x)
    P = np.atleast_2d(np.asarray(points, dtype=float))
    y = P[0].astype(float).copy()
    f = float((y - x) @ (y - x))
    gap = f
    for _ in range(iters):
        g = y - x
        scores = P @ g
        j = int(np.argmin(scores))
        v = P[j]
        gap = 2.0 * float(g @ (y - v))
        if gap <= gap_tol * (1.0 + f):
            break
        dvec = v - y
        den = float(dvec @ dvec)
        if den <= 0.0:
            break
        step = min(1.0, max(0.0, -float(g @ dvec) / den))
        if step <= 0.0:
            break
        y = y + step * dvec
        f = float((y - x) @ (y - x))
    f = float((y - x) @ (y - x))
    upper = np.sqrt(f)
    lower = np.sqrt(max(f - max(gap, 0.0), 0.0))
    return float(upper), float(lower)


# ---------------------------------------------------------------------------
# convex hull (d <= 3), degeneracy-aware


def _dedupe_points(points: np.ndarray, decimals: int = 12) -> np.ndarray:
    seen = {}
    for p in points:
        key = tuple(np.round(p, decimals))
        if key not in seen:
            seen[key] = p
    return np.array(list(seen.values()), dtype=float)


def _affine_basis(pts: np.ndarray, tol: float = EPS):
    origin = pts[0]
    M = pts - origin
    if M.shape[0] == 1:
        return 0, np.zeros((0, pts.shape[1])), np.eye(pts.shape[1]), origin
    U, s, Vt = np.linalg.svd(M, full_matrices=True)
    scale = max(1.0, float(s[0]) if s.size else 1.0)
    rank = int(np.sum(s > tol * scale))
    return rank, Vt[:rank], Vt, origin


def _chain_2d(pts2: np.ndarray) -> list:
    """Monotone chain; returns CCW hull vertex indices starting at lex-min."""
    order = np.lexsort((pts2[:, 1], pts2[:, 0]))
    pts = [tuple(pts2[i]) for i in order]
    idx = list(order)
    span = max(1.0, float(np.abs(pts2).max()))
    ctol = 1e-12 * span * span

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, lidx = [], []
    for p, i in zip(pts, idx):
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= ctol:
            lower.pop()
            lidx.pop()
        lower.append(p)
        lidx.append(i)
    upper, uidx = [], []
    for p, i in zip(reversed(pts), reversed(idx)):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= ctol:
            upper.pop()
            uidx.pop()
        upper.append(p)
        uidx.append(i)
    return lidx[:-1] + uidx[:-1]


def convex_hull(points) -> ConvexRegion:
    """Convex hull with V- and H-representation, d <= 3.

    Collinear and coplanar inputs produce lower-dimensional hulls whose
    H-representation includes equality pairs, so membership stays exact.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise EmptyInput("convex hull of nothing")
    d = pts.shape[1]
    if d > 3:
        raise DimensionMismatch("convex_hull supports d <= 3")
    pts = _dedupe_points(pts)
    rank, basis, Vt_full, origin = _affine_basis(pts)

    hs: list = []

    def eq_pairs(normals, point):
        for nvec in normals:
            off = float(nvec @ point)
            hs.append(Halfspace(nvec.copy(), off))
            hs.append(Halfspace(-nvec.copy(), -off))

    if rank == 0:
        eq_pairs(np.eye(d), pts[0])
        return ConvexRegion(vertices=pts[:1].copy(), halfspaces=hs)

    if rank == 1:
        u = basis[0]
        t = (pts - origin) @ u
        p_lo = pts[int(np.argmin(t))]
        p_hi = pts[int(np.argmax(t))]
        hs.append(Halfspace(u.copy(), float(u @ p_hi)))
        hs.append(Halfspace(-u.copy(), -float(u @ p_lo)))
        eq_pairs(Vt_full[1:], origin)
        return ConvexRegion(vertices=np.array([p_lo, p_hi]), halfspaces=hs)

    if rank == 2:
        coords = (pts - origin) @ basis.T
        hull_idx = _chain_2d(coords)
        V = pts[hull_idx]
        two_d = coords[hull_idx]
        k = len(hull_idx)
        for i in range(k):
            p2, q2 = two_d[i], two_d[(i + 1) % k]
            e = q2 - p2
            n2 = np.array([e[1], -e[0]])
            nn = float(np.linalg.norm(n2))
            if nn <= 1e-15:
                continue
            n2 /= nn
            nvec = n2[0] * basis[0] + n2[1] * basis[1]
            hs.append(Halfspace(nvec, float(nvec @ V[i])))
        if d == 3:
            eq_pairs(Vt_full[2:], origin)
        return ConvexRegion(vertices=V, halfspaces=hs)

    # full-dimensional in R^3
    from scipy.spatial import ConvexHull as _SciHull

    hull = _SciHull(pts)
    vid = sorted(hull.vertices.tolist(), key=lambda i: tuple(pts[i]))
    V = pts[vid]
    seen = set()
    for eqrow in hull.equations:
        nvec, off = eqrow[:d], eqrow[d]
        key = tuple(np.round(np.concatenate([nvec, [off]]), 10))
        if key in seen:
            continue
        seen.add(key)
        hs.append(Halfspace(nvec.copy(), -float(off)))
    return ConvexRegion(vertices=V, halfspaces=hs)


# ---------------------------------------------------------------------------
# reachability region F(R, S) = {p : some segment from p to S meets R}


def _vertices_of(obj) -> np.ndarray:
    if isinstance(obj, ConvexRegion):
        return obj.vertices
    if isinstance(obj, Segment):
        return np.array([obj.a, obj.b])
    arr = np.atleast_2d(np.asarray(obj, dtype=float))
    return arr


def f_region(R, S) -> ConvexRegion:
    """Region of points p such that the segment from p to some q in S
    intersects R.  Equals conv(R) + cone{beta - phi} over vertices beta of R
    and phi of S; the whole space when R and S already intersect."""
    VR = _vertices_of(R)
    VS = _vertices_of(S)
    d = VR.shape[1]
    if VS.shape[1] != d:
        raise DimensionMismatch("f_region operands disagree on dimension")
    if regions_intersect(VR, VS):
        return universal_region(d)
    rays = []
    seen = set()
    for beta in VR:
        for phi in VS:
            rvec = beta - phi
            nn = float(np.linalg.norm(rvec))
            if nn <= 1e-13:
                continue
            key = tuple(np.round(rvec / nn, 10))
            if key in seen:
                continue
            seen.add(key)
            rays.append(rvec)
    return ConvexRegion(vertices=VR.copy(), rays=np.array(rays))


# ---------------------------------------------------------------------------
# clipping


def _interval_to_segment(seg: Segment, t0: float, t1: float) -> Segment:
    t0 = min(1.0, max(0.0, t0))
    t1 = min(1.0, max(t0, t1))
    return seg.subsegment(t0, t1)


def clip_t_by_halfspace(seg: Segment, h: Halfspace, t0: float, t1: float,
                        tol: float = HS_EPS):
    """Clip the parameter interval [t0, t1] of seg by one halfspace.

    Returns (t0', t1') or None.  Exact floating clip; tolerance only pads
    the emptiness decision (closed boundary policy).
    """
    nda = float(h.normal @ seg.a)
    ndd = float(h.normal @ seg.direction())
    scale = 1.0 + abs(h.offset) + abs(nda) + abs(ndd)
    slack = h.offset - nda
    if abs(ndd) <= tol * scale:
        if -slack <= tol * scale:
            return t0, t1
        return None
    tcross = slack / ndd
    if ndd > 0:
        t1 = min(t1, tcross)
    else:
        t0 = max(t0, tcross)
    if t0 > t1:
        if t0 > t1 + tol * max(1.0, scale):
            return None
        tm = 0.5 * (t0 + t1)
        return tm, tm
    return t0, t1


def clip_segment_halfspace(seg: Segment, h: Halfspace, tol: float = HS_EPS):
    res = clip_t_by_halfspace(seg, h, 0.0, 1.0, tol)
    if res is None:
        return None
    t0, t1 = res
    if t0 > t1:
        t1 = t0
    return _interval_to_segment(seg, t0, t1)


def clip_t_by_halfspaces(seg: Segment, halfspaces, t0: float = 0.0,
                         t1: float = 1.0, tol: float = EPS):
    for h in halfspaces:
        res = clip_t_by_halfspace(seg, h, t0, t1, tol)
        if res is None:
            return None
        t0, t1 = res
    if t0 > t1:
        t1 = t0
    return t0, t1


def clip_segment_convex(seg: Segment, region: ConvexRegion, tol: float = EPS):
    """Intersect a segment with a convex region; None when empty.

    Bounded regions with an H-representation clip by halfspaces; regions
    with ray generators clip by a pair of small LPs (min and max parameter).
    """
    if region.universal:
        return Segment(seg.a.copy(), seg.b.copy())
    if region.rays.shape[0] == 0 and region.halfspaces is not None:
        res = clip_t_by_halfspaces(seg, region.halfspaces, 0.0, 1.0, tol)
        if res is None:
            return None
        return _interval_to_segment(seg, *res)
    return _clip_segment_cone(seg, region, tol)


def _clip_segment_cone(seg: Segment, region: ConvexRegion, tol: float):
    V = region.vertices
    R = region.rays
    k, d = V.shape
    r = R.shape[0]
    dvec = seg.direction()
    if float(np.linalg.norm(dvec)) <= 1e-13:
        return Segment(seg.a.copy(), seg.b.copy()) if region.contains(seg.a, tol) else None
    # variables: k hull coefficients, r ray coefficients, t, slack u (t+u=1)
    n = k + r + 2
    A = np.zeros((d + 2, n))
    A[:d, :k] = V.T
    if r:
        A[:d, k:k + r] = R.T
    A[:d, k + r] = -dvec
    A[d, :k] = 1.0
    A[d + 1, k + r] = 1.0
    A[d + 1, k + r + 1] = 1.0
    b = np.concatenate([seg.a, [1.0, 1.0]])
    c_lo = np.zeros(n)
    c_lo[k + r] = 1.0
    status, x, t_lo = solve_lp(c_lo, A, b)
    if status != "optimal":
        return None
    status, x, neg_t_hi = solve_lp(-c_lo, A, b)
    if status != "optimal":
        return None
    t_hi = -neg_t_hi
    t_lo = min(1.0, max(0.0, t_lo))
    t_hi = min(1.0, max(t_lo, t_hi))
    return _interval_to_segment(seg, t_lo, t_hi)


def _quad_leq_interval(a: float, b: float, c: float, tol: float = 1e-12):
    """Solution interval of a*t^2 + b*t + c <= 0 over the reals.

    Assumes a >= 0 up to noise (convex constraint).  Returns (lo, hi),
    possibly infinite, or None when empty; emptiness errs toward non-empty.
    """
    scale = max(1.0, abs(a), abs(b), abs(c))
    if a <= tol * scale:
        if abs(b) <= tol * scale:
            return (-np.inf, np.inf) if c <= tol * scale else None
        bound = -c / b
        return (-np.inf, bound) if b > 0 else (bound, np.inf)
    disc = b * b - 4.0 * a * c
    if disc < -tol * scale * scale:
        return None
    disc = max(disc, 0.0)
    root = np.sqrt(disc)
    return ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a))


def segment_ball_interval(seg: Segment, ball: Ball, tol: float = 1e-12):
    """Parameter interval of seg inside the ball, or None."""
    dvec = seg.direction()
    w = seg.a - ball.center
    a = float(dvec @ dvec)
    b = 2.0 * float(dvec @ w)
    c = float(w @ w) - ball.radius * ball.radius
    res = _quad_leq_interval(a, b, c, tol)
    if res is None:
        return None
    lo, hi = max(res[0], 0.0), min(res[1], 1.0)
    if lo > hi + tol:
        return None
    return lo, min(hi, max(lo, hi))


def segment_ball_intersection_extremes(seg: Segment, ball: Ball):
    """Earliest and latest points of seg inside the ball, or None.

    A tangent contact returns the same point twice (closed policy)."""
    res = segment_ball_interval(seg, ball)
    if res is None:
        return None
    lo, hi = res
    return seg.point_at(lo), seg.point_at(hi)


def clip_segment_ball(seg: Segment, ball: Ball):
    res = segment_ball_interval(seg, ball)
    if res is None:
        return None
    return _interval_to_segment(seg, *res)


def clip_segment_cylinder(seg: Segment, cyl: Cylinder, tol: float = EPS):
    """Intersect a segment with a finite flat-capped cylinder; None if empty."""
    u = cyl.axis.direction()
    L = float(np.linalg.norm(u))
    if L <= EPS:
        return clip_segment_ball(seg, Ball(cyl.axis.a, cyl.radius))
    u = u / L
    # slab: 0 <= (p(t) - A).u <= L
    t0, t1 = 0.0, 1.0
    for h in (Halfspace.geq(u, float(u @ cyl.axis.a)),
              Halfspace(u, float(u @ cyl.axis.a) + L)):
        res = clip_t_by_halfspace(seg, h, t0, t1, HS_EPS)
        if res is None:
            return None
        t0, t1 = res
    # lateral: |perp(p(t) - A)|^2 <= r^2
    w0 = seg.a - cyl.axis.a
    dvec = seg.direction()
    w0p = w0 - float(w0 @ u) * u
    dp = dvec - float(dvec @ u) * u
    a = float(dp @ dp)
    b = 2.0 * float(dp @ w0p)
    c = float(w0p @ w0p) - cyl.radius * cyl.radius
    res = _quad_leq_interval(a, b, c)
    if res is None:
        return None
    t0 = max(t0, res[0])
    t1 = min(t1, res[1])
    if t0 > t1 + 1e-12:
        return None
    return _interval_to_segment(seg, t0, min(t1, max(t0, t1)))


def segment_capsule_interval(seg: Segment, axis: Segment, radius: float,
                             tol: float = 1e-12):
    """Parameter interval of seg within distance `radius` of the axis segment.

    The constraint set (a capsule: cylinder with rounded caps) is convex, so
    the feasible parameters form one interval.  Solved exactly by splitting
    the parameter line at the two cap planes and solving a quadratic on each
    piece."""
    u = axis.direction()
    L = float(np.linalg.norm(u))
    if L <= 1e-13:
        return segment_ball_interval(seg, Ball(axis.a, radius), tol)
    u = u / L
    dvec = seg.direction()
    z0 = float((seg.a - axis.a) @ u)
    dz = float(dvec @ u)

    pieces = []

    def add_quad(lo, hi, a, b, c):
        res = _quad_leq_interval(a, b, c, tol)
        if res is None:
            return
        plo, phi = max(lo, res[0]), min(hi, res[1])
        if plo <= phi + tol:
            pieces.append((plo, min(phi, max(plo, phi))))

    # breakpoints where the nearest feature of the axis changes
    cuts = []
    if abs(dz) > 1e-13:
        cuts.extend([(0.0 - z0) / dz, (L - z0) / dz])
    knots = sorted(set([0.0, 1.0] + [min(1.0, max(0.0, c)) for c in cuts]))
    r2 = radius * radius
    w_a = seg.a - axis.a
    w_b = seg.a - axis.b
    perp_w = w_a - z0 * u
    perp_d = dvec - dz * u
    for lo, hi in zip(knots[:-1], knots[1:]):
        if hi < lo:
            continue
        mid = 0.5 * (lo + hi)
        z = z0 + mid * dz
        if z <= 0.0:
            a = float(dvec @ dvec)
            b = 2.0 * float(dvec @ w_a)
            c = float(w_a @ w_a) - r2
        elif z >= L:
            a = float(dvec @ dvec)
            b = 2.0 * float(dvec @ w_b)
            c = float(w_b @ w_b) - r2
        else:
            a = float(perp_d @ perp_d)
            b = 2.0 * float(perp_d @ perp_w)
            c = float(perp_w @ perp_w) - r2
        add_quad(lo, hi, a, b, c)
    if not pieces:
        return None
    lo = min(p[0] for p in pieces)
    hi = max(p[1] for p in pieces)
    return lo, hi


def clip_segment_capsule(seg: Segment, axis: Segment, radius: float):
    res = segment_capsule_interval(seg, axis, radius)
    if res is None:
        return None
    return _interval_to_segment(seg, *res)


def segment_box_ball_interval(seg: Segment, lo, hi, radius: float,
                              tol: float = 1e-12):
    """Parameter interval of seg within distance `radius` of the box [lo, hi].

    The squared box distance is convex and piecewise quadratic along the
    segment; solved numerically (ternary search for the minimum, bisection
    for the crossings) to parameter accuracy `tol`."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    r2 = radius * radius

    def f(t):
        p = seg.point_at(t)
        clamped = np.minimum(np.maximum(p, lo), hi)
        diff = p - clamped
        return float(diff @ diff)

    a, b = 0.0, 1.0
    fa, fb = f(a), f(b)
    la, lb = a, b
    for _ in range(200):
        if lb - la <= tol:
            break
        m1 = la + (lb - la) / 3.0
        m2 = lb - (lb - la) / 3.0
        if f(m1) <= f(m2):
            lb = m2
        else:
            la = m1
    tmin = 0.5 * (la + lb)
    fmin = f(tmin)
    scale = max(1.0, r2)
    if fmin > r2 + 1e-9 * scale:
        return None
    # left crossing in [0, tmin], right crossing in [tmin, 1]
    if fa <= r2 + 1e-12 * scale:
        t_left = 0.0
    else:
        x0, x1 = 0.0, tmin
        for _ in range(80):
            xm = 0.5 * (x0 + x1)
            if f(xm) > r2:
                x0 = xm
            else:
                x1 = xm
        t_left = x1
    if fb <= r2 + 1e-12 * scale:
        t_right = 1.0
    else:
        x0, x1 = tmin, 1.0
        for _ in range(80):
            xm = 0.5 * (x0 + x1)
            if f(xm) > r2:
                x1 = xm
            else:
                x0 = xm
        t_right = x0
    return t_left, t_right


def segment_box_distance(seg: Segment, lo, hi, tol: float = 1e-12) -> float:
    """Minimum distance from any point of seg to the box [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)

    def f(t):
        p = seg.point_at(t)
        clamped = np.minimum(np.maximum(p, lo), hi)
        diff = p - clamped
        return float(diff @ diff)

    la, lb = 0.0, 1.0
    for _ in range(200):
        if lb - la <= tol:
            break
        m1 = la + (lb - la) / 3.0
        m2 = lb - (lb - la) / 3.0
        if f(m1) <= f(m2):
            lb = m2
        else:
            la = m1
    return math.sqrt(f(0.5 * (la + lb)))


# ---------------------------------------------------------------------------
# boxes and Minkowski shifts


def box_halfspaces(lo, hi) -> list:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.shape[0]
    hs = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        hs.append(Halfspace(e.copy(), float(hi[i])))
        hs.append(Halfspace(-e, -float(lo[i])))
    return hs


def box_support(lo, hi, direction) -> float:
    """max over the box of direction . x."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    e = np.asarray(direction, dtype=float)
    return float(np.where(e > 0, hi, lo) @ e)


def box_plus_forward_halfspace(lo, hi, e) -> Halfspace:
    """Minkowski sum of box with {x : e.x >= 0} is one shifted halfspace:
    {z : e.z >= min over box of e.y}."""
    bound = -box_support(lo, hi, -np.asarray(e, dtype=float))
    return Halfspace.geq(e, bound)


def box_plus_backward_halfspace(lo, hi, e) -> Halfspace:
    """Minkowski sum of box with {x : e.x <= 0}: {z : e.z <= max over box}."""
    return Halfspace(np.asarray(e, dtype=float), box_support(lo, hi, e))
