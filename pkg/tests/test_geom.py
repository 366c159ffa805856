"""Geometric primitives: projections, hulls, reachability regions, clips."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from frechet_kit.errors import DegenerateSegment
from frechet_kit.geom import (
    Ball,
    ConvexRegion,
    Cylinder,
    Halfspace,
    Segment,
    clip_segment_convex,
    clip_segment_cylinder,
    clip_segment_halfspace,
    convex_hull,
    f_region,
    point_box_distance,
    project_onto_segment_line,
    segment_ball_intersection_extremes,
)

RNG_SEED = 20240817


# ---------------------------------------------------------------------------
# local oracles


def gift_wrap_2d(pts: np.ndarray) -> np.ndarray:
    """Jarvis march; returns the hull vertices (subset of pts)."""
    pts = np.asarray(pts, dtype=float)
    start = min(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1]))
    hull = [start]
    while True:
        cur = hull[-1]
        cand = 0 if cur != 0 else 1
        for j in range(len(pts)):
            if j == cur:
                continue
            u = pts[j] - pts[cur]
            w = pts[cand] - pts[cur]
            cross = u[0] * w[1] - u[1] * w[0]
            far = (np.linalg.norm(pts[j] - pts[cur])
                   > np.linalg.norm(pts[cand] - pts[cur]))
            if cand == cur or cross > 1e-12 or (abs(cross) <= 1e-12 and far):
                cand = j
        if cand == start:
            break
        hull.append(cand)
        if len(hull) > len(pts):
            raise RuntimeError("gift wrapping did not close")
    return pts[hull]


def seg_hits_box(p: np.ndarray, q: np.ndarray, lo: np.ndarray,
                 hi: np.ndarray) -> bool:
    """Slab test: does the segment p->q meet the axis-aligned box."""
    t0, t1 = 0.0, 1.0
    for k in range(len(lo)):
        dk = q[k] - p[k]
        if abs(dk) < 1e-15:
            if p[k] < lo[k] or p[k] > hi[k]:
                return False
            continue
        a = (lo[k] - p[k]) / dk
        b = (hi[k] - p[k]) / dk
        if a > b:
            a, b = b, a
        t0 = max(t0, a)
        t1 = min(t1, b)
        if t0 > t1:
            return False
    return True


def scan_clip(seg: Segment, member_mask, n: int = 10 ** 4):
    """Clip by dense parameter scan; member_mask maps an (N,2) array of
    points to a boolean array."""
    ts = np.linspace(0.0, 1.0, n + 1)
    pts = seg.a[None, :] + ts[:, None] * (seg.b - seg.a)[None, :]
    keep = ts[member_mask(pts)]
    if keep.size == 0:
        return None
    return float(keep.min()), float(keep.max())


def box_region(lo, hi) -> ConvexRegion:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    corners = np.array([[lo[0], lo[1]], [hi[0], lo[1]],
                        [hi[0], hi[1]], [lo[0], hi[1]]])
    return convex_hull(corners)


# ---------------------------------------------------------------------------
# projections


def test_project_midpoint():
    pt, t = project_onto_segment_line((1, 1), Segment((0, 0), (2, 0)))
    assert_allclose(pt, [1.0, 0.0], atol=1e-12)
    assert_allclose(t, 0.5, atol=1e-12)


def test_project_beyond_end():
    pt, t = project_onto_segment_line((3, 5), Segment((0, 0), (1, 0)))
    assert_allclose(pt, [3.0, 0.0], atol=1e-12)
    assert_allclose(t, 3.0, atol=1e-12)


def test_project_negative_t_orthogonal():
    x = np.array([0.0, 0.0])
    seg = Segment((1, 1), (2, 2))
    pt, t = project_onto_segment_line(x, seg)
    assert_allclose(pt, [0.0, 0.0], atol=1e-12)
    assert_allclose(t, -1.0, atol=1e-12)
    # residual is orthogonal to the carrier direction
    assert abs((x - pt) @ seg.direction()) <= 1e-9


def test_project_degenerate_raises():
    with pytest.raises(DegenerateSegment):
        project_onto_segment_line((1, 2), Segment((3, 3), (3, 3)))


def test_project_orthogonality_random():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        a, b, x = rng.uniform(-5, 5, (3, 2))
        if np.linalg.norm(b - a) < 1e-3:
            continue
        seg = Segment(a, b)
        pt, _ = project_onto_segment_line(x, seg)
        bound = 1e-9 * np.linalg.norm(x) * np.linalg.norm(b - a) + 1e-12
        assert abs((x - pt) @ seg.direction()) <= bound


# ---------------------------------------------------------------------------
# convex hull


def test_hull_square_with_center():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]])
    hull = convex_hull(pts)
    assert hull.vertices.shape[0] == 4
    got = {tuple(np.round(v, 9)) for v in hull.vertices}
    assert got == {(0, 0), (1, 0), (1, 1), (0, 1)}


def test_hull_collinear():
    hull = convex_hull(np.array([[0, 0], [1, 1], [2, 2]]))
    assert hull.vertices.shape[0] == 2
    got = {tuple(np.round(v, 9)) for v in hull.vertices}
    assert got == {(0, 0), (2, 2)}


def test_hull_random_vs_gift_wrap():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        pts = rng.uniform(-3, 3, (rng.integers(3, 12), 2))
        hull = convex_hull(pts)
        want = {tuple(np.round(v, 7)) for v in gift_wrap_2d(pts)}
        got = {tuple(np.round(v, 7)) for v in hull.vertices}
        assert got == want


# ---------------------------------------------------------------------------
# reachability region F(R, S)


def test_f_region_point_pair_is_ray():
    reg = f_region(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]))
    assert reg.contains((-3.0, 0.0))
    assert reg.contains((0.0, 0.0))
    assert not reg.contains((0.5, 0.0))
    assert not reg.contains((-1.0, 0.01))


def test_f_region_overlapping_is_universal():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    reg = f_region(sq, sq)
    assert reg.universal
    assert reg.contains((123.0, -456.0))


def test_f_region_contains_R():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(20):
        R = rng.uniform(-2, 2, (3, 2))
        S = rng.uniform(3, 5, (2, 2))
        reg = f_region(R, S)
        for v in R:
            assert reg.contains(v, tol=1e-7)


def test_f_region_monotone_in_S():
    # S' a subset of S can only shrink the region
    rng = np.random.default_rng(RNG_SEED + 1)
    for _ in range(10):
        R = rng.uniform(-1, 1, (3, 2))
        S = rng.uniform(2.5, 4, (4, 2))
        big = f_region(R, S)
        small = f_region(R, S[:2])
        for _ in range(50):
            p = rng.uniform(-6, 6, 2)
            if small.contains(p, tol=1e-9):
                assert big.contains(p, tol=1e-6)


def sample_oracle(p, R_lo, R_hi, S_pts, inflate):
    """Existential check: some q in the S sample reaches p through the
    (inflated) R box."""
    lo = R_lo - inflate
    hi = R_hi + inflate
    return any(seg_hits_box(np.asarray(p, float), q, lo, hi) for q in S_pts)


def test_f_region_squares_vs_sampling_oracle():
    # unit squares roughly distance 3 apart, probes checked outside a
    # 1e-6 boundary band; the S sample is dense enough that inflating R
    # by the sample step certifies non-membership
    rng = np.random.default_rng(RNG_SEED + 2)
    step = 0.02
    for _ in range(8):
        r_lo = rng.uniform(-1, 0, 2)
        s_lo = r_lo + rng.normal(0, 0.3, 2) + np.array([3.0, 0.0])
        R = box_region(r_lo, r_lo + 1.0)
        S = box_region(s_lo, s_lo + 1.0)
        reg = f_region(R.vertices, S.vertices)
        g = np.arange(0.0, 1.0 + step / 2, step)
        S_pts = np.stack(np.meshgrid(s_lo[0] + g, s_lo[1] + g),
                         axis=-1).reshape(-1, 2)
        for _ in range(120):
            p = rng.uniform(-4, 6, 2)
            member_certain = sample_oracle(p, r_lo, r_lo + 1.0, S_pts,
                                           -1e-6)
            nonmember_certain = not sample_oracle(
                p, r_lo, r_lo + 1.0, S_pts, step * math.sqrt(2) + 1e-6)
            if member_certain:
                assert reg.contains(p, tol=1e-7)
            elif nonmember_certain:
                assert not reg.contains(p, tol=1e-7)


# ---------------------------------------------------------------------------
# segment clipping


def test_clip_convex_unit_square():
    seg = Segment((-1, 0), (2, 0))
    out = clip_segment_convex(seg, box_region((0, 0), (1, 1)))
    assert out is not None
    assert_allclose(out.a, [0.0, 0.0], atol=1e-9)
    assert_allclose(out.b, [1.0, 0.0], atol=1e-9)


def test_clip_convex_miss():
    seg = Segment((-1, 5), (2, 5))
    assert clip_segment_convex(seg, box_region((0, 0), (1, 1))) is None


def test_clip_convex_random_vs_scan():
    rng = np.random.default_rng(RNG_SEED + 3)
    for _ in range(25):
        lo = rng.uniform(-2, 0, 2)
        hi = lo + rng.uniform(0.5, 2, 2)
        region = box_region(lo, hi)
        seg = Segment(rng.uniform(-4, 4, 2), rng.uniform(-4, 4, 2))
        got = clip_segment_convex(seg, region)
        want = scan_clip(
            seg, lambda P: np.all((P >= lo - 1e-12) & (P <= hi + 1e-12),
                                  axis=1))
        if want is None:
            # scan can miss crossings thinner than its step
            if got is not None:
                assert got.length() <= 2e-4 * seg.length()
            continue
        assert got is not None
        L = max(seg.length(), 1e-9)
        assert abs(np.linalg.norm(got.a - seg.a) / L - want[0]) <= 1e-4
        assert abs(np.linalg.norm(got.b - seg.a) / L - want[1]) <= 1e-4


def test_clip_halfspace_examples():
    h = Halfspace(np.array([0.0, 1.0]), 0.0)  # y <= 0
    out = clip_segment_halfspace(Segment((0, -1), (0, 1)), h)
    assert_allclose(out.a, [0.0, -1.0], atol=1e-12)
    assert_allclose(out.b, [0.0, 0.0], atol=1e-12)
    inside = Segment((0, -3), (1, -2))
    kept = clip_segment_halfspace(inside, h)
    assert_allclose(kept.a, inside.a, atol=1e-12)
    assert_allclose(kept.b, inside.b, atol=1e-12)


def test_clip_halfspace_tangent_vs_scan():
    h = Halfspace.geq(np.array([0.0, 1.0]), 1.0)  # y >= 1
    seg = Segment((-1, 1), (1, 1))  # runs inside the boundary
    out = clip_segment_halfspace(seg, h)
    assert out is not None
    assert_allclose(out.a, seg.a, atol=1e-9)
    assert_allclose(out.b, seg.b, atol=1e-9)


def test_clip_cylinder_examples():
    cyl = Cylinder(Segment((0, 0), (2, 0)), 1.0)
    out = clip_segment_cylinder(Segment((-5, 0), (5, 0)), cyl)
    assert_allclose(out.a, [0.0, 0.0], atol=1e-9)
    assert_allclose(out.b, [2.0, 0.0], atol=1e-9)
    out = clip_segment_cylinder(Segment((1, 2), (1, -2)), cyl)
    assert_allclose(out.a, [1.0, 1.0], atol=1e-9)
    assert_allclose(out.b, [1.0, -1.0], atol=1e-9)


def test_clip_cylinder_random_vs_scan():
    rng = np.random.default_rng(RNG_SEED + 4)
    for _ in range(25):
        axis = Segment(rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2))
        if axis.length() < 0.3:
            continue
        cyl = Cylinder(axis, rng.uniform(0.3, 1.2))
        seg = Segment(rng.uniform(-4, 4, 2), rng.uniform(-4, 4, 2))
        got = clip_segment_cylinder(seg, cyl)
        e = axis.direction()
        L2 = float(e @ e)

        def in_cyl(P):
            # slab along the axis plus radial distance to the carrier line
            t = (P - axis.a) @ e / L2
            foot = axis.a[None, :] + t[:, None] * e[None, :]
            rad = np.linalg.norm(P - foot, axis=1)
            return ((t >= -1e-12) & (t <= 1.0 + 1e-12)
                    & (rad <= cyl.radius + 1e-12))

        want = scan_clip(seg, in_cyl, n=4 * 10 ** 4)
        if want is None:
            if got is not None:
                assert got.length() <= 2e-4 * seg.length()
            continue
        assert got is not None
        L = max(seg.length(), 1e-9)
        assert abs(np.linalg.norm(got.a - seg.a) / L - want[0]) <= 1e-4
        assert abs(np.linalg.norm(got.b - seg.a) / L - want[1]) <= 1e-4


def test_clip_monotone_composition():
    # clip(s, A intersect B) == clip(clip(s, A), B)
    rng = np.random.default_rng(RNG_SEED + 5)
    for _ in range(30):
        n1 = rng.normal(0, 1, 2)
        n2 = rng.normal(0, 1, 2)
        h1 = Halfspace(n1 / np.linalg.norm(n1), rng.uniform(-1, 1))
        h2 = Halfspace(n2 / np.linalg.norm(n2), rng.uniform(-1, 1))
        seg = Segment(rng.uniform(-3, 3, 2), rng.uniform(-3, 3, 2))
        step1 = clip_segment_halfspace(seg, h1)
        seq = None if step1 is None else clip_segment_halfspace(step1, h2)
        both = clip_segment_halfspace(seg, h1)
        if both is not None:
            both = clip_segment_halfspace(both, h2)
        # also compare against the convex-region clip with both halfspaces
        region = ConvexRegion(vertices=np.zeros((1, 2)), universal=True)
        region.halfspaces = [h1, h2]
        if seq is None:
            assert both is None
            continue
        assert both is not None
        assert_allclose(seq.a, both.a, atol=1e-9)
        assert_allclose(seq.b, both.b, atol=1e-9)


# ---------------------------------------------------------------------------
# segment-ball intersection extremes


def quad_ball_oracle(seg: Segment, ball: Ball):
    # roots of |a + t*d - c|^2 = r^2 clamped to [0, 1]
    dvec = seg.direction()
    f = seg.a - ball.center
    A = float(dvec @ dvec)
    B = float(2.0 * f @ dvec)
    C = float(f @ f) - ball.radius ** 2
    if A <= 0:
        return (0.0, 1.0) if C <= 0 else None
    disc = B * B - 4 * A * C
    if disc < 0:
        return None
    s = math.sqrt(disc)
    t0 = (-B - s) / (2 * A)
    t1 = (-B + s) / (2 * A)
    t0, t1 = max(0.0, t0), min(1.0, t1)
    if t0 > t1:
        return None
    return t0, t1


def test_ball_extremes_examples():
    seg = Segment((-2, 0), (2, 0))
    out = segment_ball_intersection_extremes(seg, Ball((0, 0), 1.0))
    assert out is not None
    assert_allclose(out[0], [-1.0, 0.0], atol=1e-10)
    assert_allclose(out[1], [1.0, 0.0], atol=1e-10)


def test_ball_extremes_tangent():
    seg = Segment((-2, 1), (2, 1))
    out = segment_ball_intersection_extremes(seg, Ball((0, 0), 1.0))
    assert out is not None
    assert_allclose(out[0], out[1], atol=1e-7)
    assert_allclose(out[0], [0.0, 1.0], atol=1e-7)


def test_ball_extremes_random_vs_quadratic():
    rng = np.random.default_rng(RNG_SEED + 6)
    for _ in range(60):
        seg = Segment(rng.uniform(-3, 3, 2), rng.uniform(-3, 3, 2))
        ball = Ball(rng.uniform(-2, 2, 2), rng.uniform(0.2, 1.5))
        got = segment_ball_intersection_extremes(seg, ball)
        want = quad_ball_oracle(seg, ball)
        if want is None:
            assert got is None
            continue
        assert got is not None
        assert_allclose(got[0], seg.point_at(want[0]), atol=1e-10)
        assert_allclose(got[1], seg.point_at(want[1]), atol=1e-10)


def test_point_box_distance_basic():
    assert point_box_distance((2, 0), (0, 0), (1, 1)) == pytest.approx(1.0)
    assert point_box_distance((0.5, 0.5), (0, 0), (1, 1)) == 0.0
