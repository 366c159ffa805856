"""Distance computations: decision procedure, bisection, discrete DP."""

import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from frechet_kit.frechet import (
    PolygonalCurve,
    densify,
    discrete_frechet,
    frechet_distance,
    free_space_decision,
    pad_curve,
)

RNG_SEED = 90210


def curve(*pts) -> PolygonalCurve:
    return PolygonalCurve(np.array(pts, dtype=float))


def random_curve(rng, max_m=6) -> PolygonalCurve:
    m = int(rng.integers(2, max_m + 1))
    return PolygonalCurve(rng.uniform(0.0, 1.0, (m, 2)))


def coupling_min_max(P: np.ndarray, Q: np.ndarray) -> float:
    """Exhaustive min over monotone couplings of the max pair distance."""
    p, q = len(P), len(Q)
    D = np.linalg.norm(P[:, None, :] - Q[None, :, :], axis=2)
    best = [np.inf]

    def walk(i, j, cur):
        cur = max(cur, D[i, j])
        if cur >= best[0]:
            return
        if i == p - 1 and j == q - 1:
            best[0] = cur
            return
        if i + 1 < p:
            walk(i + 1, j, cur)
        if j + 1 < q:
            walk(i, j + 1, cur)
        if i + 1 < p and j + 1 < q:
            walk(i + 1, j + 1, cur)

    walk(0, 0, 0.0)
    return best[0]


# ---------------------------------------------------------------------------
# decision procedure


def test_decision_identical_at_zero():
    a = curve((0, 0), (1, 2), (3, 1))
    assert free_space_decision(a, a, 0.0)


def test_decision_parallel_offset():
    a = curve((0, 0), (1, 0))
    b = curve((0, 1), (1, 1))
    assert not free_space_decision(a, b, 0.999)
    assert free_space_decision(a, b, 1.0)


def test_decision_segment_vs_tent():
    a = curve((0, 0), (2, 0))
    b = curve((0, 0), (1, 1), (2, 0))
    assert not free_space_decision(a, b, 0.999)
    assert free_space_decision(a, b, 1.0)
    # cross-check the 1.0 crossover against the densified discrete value
    D = discrete_frechet(densify(a, 0.01), densify(b, 0.01))
    assert abs(D - 1.0) <= 0.01


def test_decision_monotone_in_delta():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(20):
        a, b = random_curve(rng), random_curve(rng)
        answers = [free_space_decision(a, b, t)
                   for t in np.linspace(0.0, 2.0, 21)]
        # once true, stays true
        assert answers == sorted(answers)


def test_decision_symmetry():
    rng = np.random.default_rng(RNG_SEED + 1)
    for _ in range(20):
        a, b = random_curve(rng), random_curve(rng)
        t = float(rng.uniform(0.1, 1.0))
        assert free_space_decision(a, b, t) == free_space_decision(b, a, t)


# ---------------------------------------------------------------------------
# bisection distance


def test_distance_identical():
    a = curve((0, 0), (1, 1), (2, 0))
    res = frechet_distance(a, a, tol=1e-6)
    assert res.value <= 1e-6
    assert res.lower <= res.value <= res.upper


def test_distance_parallel():
    a = curve((0, 0), (1, 0))
    b = curve((0, 1), (1, 1))
    res = frechet_distance(a, b, tol=1e-6)
    assert abs(res.value - 1.0) <= 1e-6


def test_distance_vs_densified_discrete():
    # value and the h-densified discrete value agree to tol + h
    rng = np.random.default_rng(RNG_SEED + 2)
    h = 0.01
    for _ in range(100):
        a, b = random_curve(rng), random_curve(rng)
        val = frechet_distance(a, b, tol=1e-6).value
        D = discrete_frechet(densify(a, h), densify(b, h))
        assert abs(val - D) <= 1e-6 + h


def test_distance_symmetry():
    rng = np.random.default_rng(RNG_SEED + 3)
    for _ in range(20):
        a, b = random_curve(rng), random_curve(rng)
        v1 = frechet_distance(a, b, tol=1e-9).value
        v2 = frechet_distance(b, a, tol=1e-9).value
        assert abs(v1 - v2) <= 2e-9


def test_distance_endpoint_lower_bound():
    rng = np.random.default_rng(RNG_SEED + 4)
    for _ in range(30):
        a, b = random_curve(rng), random_curve(rng)
        lo = max(np.linalg.norm(a.vertices[0] - b.vertices[0]),
                 np.linalg.norm(a.vertices[-1] - b.vertices[-1]))
        assert frechet_distance(a, b).value >= lo - 1e-12


def test_sandwich_discrete_between():
    # d_F <= discrete <= d_F + longest edge
    rng = np.random.default_rng(RNG_SEED + 5)
    for _ in range(30):
        a, b = random_curve(rng), random_curve(rng)
        val = frechet_distance(a, b, tol=1e-9).value
        D = discrete_frechet(a, b)
        edge = max(
            np.linalg.norm(np.diff(a.vertices, axis=0), axis=1).max(),
            np.linalg.norm(np.diff(b.vertices, axis=0), axis=1).max())
        assert D >= val - 1e-8
        assert D <= val + edge + 1e-8


# ---------------------------------------------------------------------------
# discrete distance


def test_discrete_single_vertices():
    a = curve((0, 0))
    b = curve((3, 4))
    assert discrete_frechet(a, b) == pytest.approx(5.0)


def test_discrete_identical_zero():
    a = curve((0, 0), (1, 3), (2, 1))
    assert discrete_frechet(a, a) == 0.0


def test_discrete_staircase_vs_enumeration():
    rng = np.random.default_rng(RNG_SEED + 6)
    for _ in range(20):
        P = rng.uniform(0, 1, (3, 2))
        Q = rng.uniform(0, 1, (3, 2))
        got = discrete_frechet(PolygonalCurve(P), PolygonalCurve(Q))
        assert got == pytest.approx(coupling_min_max(P, Q), abs=1e-12)


# ---------------------------------------------------------------------------
# densify / pad


def test_densify_unit_edge():
    a = curve((0, 0), (1, 0))
    out = densify(a, 0.25)
    assert out.m == 5
    assert_allclose(out.vertices[:, 1], 0.0, atol=1e-15)
    assert_allclose(out.vertices[:, 0], [0, 0.25, 0.5, 0.75, 1.0])


def test_densify_large_step_unchanged():
    a = curve((0, 0), (1, 2), (0, 3))
    out = densify(a, 10.0)
    assert_allclose(out.vertices, a.vertices)


def test_densify_step_monotone():
    a = curve((0, 0), (2, 1), (3, 3))
    prev = np.inf
    for step in (1.0, 0.5, 0.25, 0.1):
        out = densify(a, step)
        longest = np.linalg.norm(np.diff(out.vertices, axis=0),
                                 axis=1).max()
        assert longest <= step + 1e-12
        assert longest <= prev + 1e-12
        prev = longest


def test_pad_curve_keeps_polyline():
    a = curve((0, 0), (4, 0), (4, 1))
    out = pad_curve(a, 7)
    assert out.m == 7
    # padded vertices stay on the original trace and the distance is zero
    assert frechet_distance(a, out, tol=1e-9).value <= 1e-9
