"""Grid discretizations: ball cell covers, candidate segments, fine and
coarse vertex grids."""

import itertools
import math

import numpy as np
import pytest

from frechet_kit.frechet import PolygonalCurve
from frechet_kit.discretize import (
    GridCell,
    build_G1,
    build_G2,
    build_L,
    grid_cells_of_ball,
)
from frechet_kit.geom import point_segment_distance

RNG_SEED = 515151


def curve(*pts) -> PolygonalCurve:
    return PolygonalCurve(np.array(pts, dtype=float))


def index_box_oracle(center, r, side):
    """All cell indices whose closed box meets the closed ball, found by
    scanning a sufficient index box."""
    center = np.asarray(center, dtype=float)
    d = center.shape[0]
    lo = np.floor((center - r) / side).astype(int) - 2
    hi = np.floor((center + r) / side).astype(int) + 2
    out = set()
    for idx in itertools.product(*[range(lo[k], hi[k] + 1)
                                   for k in range(d)]):
        cell_lo = np.array(idx, dtype=float) * side
        nearest = np.clip(center, cell_lo, cell_lo + side)
        if np.linalg.norm(nearest - center) <= r + 1e-12:
            out.add(idx)
    return out


# ---------------------------------------------------------------------------
# grid_cells_of_ball


def test_cells_of_ball_1d():
    cells = grid_cells_of_ball(np.array([0.0]), 1.0, 1.0)
    assert {c.index for c in cells} == {(-2,), (-1,), (0,), (1,)}


def test_cells_of_ball_2d_interior():
    cells = grid_cells_of_ball(np.array([0.5, 0.5]), 0.4, 1.0)
    assert [c.index for c in cells] == [(0, 0)]


def test_cells_of_ball_vs_index_box_oracle():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(30):
        center = rng.uniform(-3, 3, 2)
        r = float(rng.uniform(0.1, 2.0))
        side = float(rng.uniform(0.1, 1.0))
        got = {c.index for c in grid_cells_of_ball(center, r, side)}
        assert got == index_box_oracle(center, r, side)


def test_cells_of_ball_deterministic_order():
    center = np.array([0.3, -0.7])
    a = [c.index for c in grid_cells_of_ball(center, 1.1, 0.4)]
    b = [c.index for c in grid_cells_of_ball(center, 1.1, 0.4)]
    assert a == b == sorted(a)


def test_cell_geometry():
    cell = GridCell((2, -1), 0.5, None)
    assert np.allclose(cell.lo, [1.0, -0.5])
    assert np.allclose(cell.hi, [1.5, 0.0])
    assert cell.contains((1.2, -0.2))
    assert not cell.contains((0.9, -0.2))
    assert cell.corners().shape == (4, 2)


# ---------------------------------------------------------------------------
# candidate segment family


def test_build_L_horizontal_edge_parallel():
    tau = curve((0, 0), (1, 0))
    fam = build_L(tau, 0.2, 0.5)
    for (a, k), seg in fam:
        dvec = seg.direction()
        if np.linalg.norm(dvec) <= 1e-12:
            continue  # degenerate clips carry no direction
        ang = abs(dvec[1]) / np.linalg.norm(dvec)
        assert ang <= 1e-12


def test_build_L_count_bound():
    tau = curve((0, 0), (1, 0), (1.5, 0.8))
    delta, eps = 0.2, 0.5
    fam = build_L(tau, delta, eps)
    side = eps * delta
    for a in range(tau.m - 1):
        cells = grid_cells_of_ball(tau.vertices[a], delta, side)
        corners = set()
        for c in cells:
            for b in range(4):
                corners.add((c.index[0] + (b & 1), c.index[1] + (b >> 1)))
        assert len(fam.groups[a]) <= len(corners)


def test_build_L_covering():
    # every point near the first endpoint is close to some carrier segment
    tau = curve((0, 0), (1, 0.2))
    delta, eps = 0.3, 0.5
    fam = build_L(tau, delta, eps)
    segs = fam.groups[0]
    bound = math.sqrt(2) * eps * delta + 1e-9
    rng = np.random.default_rng(RNG_SEED + 1)
    for _ in range(1000):
        v = rng.normal(0, 1, 2)
        v = v / np.linalg.norm(v) * delta * math.sqrt(rng.uniform())
        p = tau.vertices[0] + v
        dmin = min(point_segment_distance(p, s) for s in segs)
        assert dmin <= bound


# ---------------------------------------------------------------------------
# fine grids


def test_g1_single_vertex_matches_ball_cover():
    tau = curve((0.2, 0.1))
    g1 = build_G1([tau], [1.0], 0.5, 1)[0]
    want = {c.index for c in grid_cells_of_ball(
        tau.vertices[0], 1.0 + math.sqrt(2) * 0.5, 0.5)}
    assert {c.index for c in g1} == want
    assert g1.side == pytest.approx(0.5)


def test_g1_count_ratio_l1_vs_l2():
    tau = curve((0, 0), (0.6, 0.4))
    a = build_G1([tau], [0.5], 0.4, 1)[0]
    b = build_G1([tau], [0.5], 0.4, 2)[0]
    ratio = len(b) / len(a)
    assert 2.0 <= ratio <= 8.0  # halving the side in d=2 is ~4x cells


def test_g1_vertex_in_own_cell():
    tau = curve((0.13, -0.4), (0.7, 0.9))
    g1 = build_G1([tau], [0.3], 0.5, 2)[0]
    for v in tau.vertices:
        assert any(c.contains(v) for c in g1)


def test_g1_coverage_radius():
    # every point within delta*(1+sqrt(d)*eps) of a vertex lies in a cell
    tau = curve((0.3, 0.2), (1.1, 0.5))
    delta, eps, l = 0.4, 0.5, 2
    g1 = build_G1([tau], [delta], eps, l)[0]
    r = delta * (1 + math.sqrt(2) * eps)
    rng = np.random.default_rng(RNG_SEED + 2)
    for _ in range(300):
        v = tau.vertices[int(rng.integers(0, tau.m))]
        u = rng.normal(0, 1, 2)
        p = v + u / np.linalg.norm(u) * r * math.sqrt(rng.uniform())
        assert any(c.contains(p, tol=1e-9) for c in g1)


def test_g1_deterministic():
    tau = curve((0, 0), (1, 1))
    a = build_G1([tau], [0.3], 0.4, 2)[0]
    b = build_G1([tau], [0.3], 0.4, 2)[0]
    assert [c.index for c in a] == [c.index for c in b]


# ---------------------------------------------------------------------------
# coarse grid


def test_g2_contains_vertex_cells():
    T = [curve((0, 0), (1, 0)), curve((0.2, 0.5), (0.8, 0.4))]
    g2 = build_G2(T, [0.2, 0.3], 0.5)
    assert g2.side == pytest.approx(0.5 * 0.3)
    for tau in T:
        for v in tau.vertices:
            assert any(c.contains(v) for c in g2)


def test_g2_radius_and_dedup():
    tau = curve((0, 0), (0.1, 0))
    g2 = build_G2([tau], [0.2], 0.5)
    idx = [c.index for c in g2]
    assert len(idx) == len(set(idx))
    assert idx == sorted(idx)
    r = 9.0 * math.sqrt(2) * 0.2
    side = 0.5 * 0.2
    # no cell lies beyond the stated radius of every vertex
    for c in g2:
        dmin = min(
            np.linalg.norm(np.clip(v, c.lo, c.hi) - v)
            for v in tau.vertices)
        assert dmin <= r + 1e-9


def test_g2_independent_of_l():
    # the coarse grid has no l parameter at all; same inputs, same cells
    T = [curve((0, 0), (1, 1))]
    a = build_G2(T, [0.25], 0.5)
    b = build_G2(T, [0.25], 0.5)
    assert [c.index for c in a] == [c.index for c in b]
