"""Greedy block simplification under a Frechet tolerance."""

import numpy as np
import pytest

from frechet_kit.errors import BudgetExceeded
from frechet_kit.frechet import (
    PolygonalCurve,
    densify,
    discrete_frechet,
    free_space_decision,
)
from frechet_kit.simplify import bicriteria_simplify

RNG_SEED = 33112


def curve(*pts) -> PolygonalCurve:
    return PolygonalCurve(np.array(pts, dtype=float))


def sampled_vee(per_leg: int) -> PolygonalCurve:
    """V shape sampled exactly on its two legs; needs three vertices."""
    left = np.linspace((0.0, 0.0), (0.5, 1.0), per_leg, endpoint=False)
    right = np.linspace((0.5, 1.0), (1.0, 0.0), per_leg + 1)
    return PolygonalCurve(np.vstack([left, right]))


def test_single_vertex_copied():
    tau = curve((0.4, 0.7))
    out = bicriteria_simplify(tau, 1.0, 0.5, 0.25)
    assert out.m == 1
    np.testing.assert_array_equal(out.vertices, tau.vertices)


def test_segment_stays_simple():
    tau = curve((0, 0), (1, 0))
    out = bicriteria_simplify(tau, 0.2, 0.5, 0.25)
    assert out.m <= 2
    assert free_space_decision(out, tau, (1 + 0.25) * 0.2)


def test_huge_delta_collapses_to_point():
    rng = np.random.default_rng(RNG_SEED)
    tau = PolygonalCurve(rng.uniform(0, 1, (9, 2)))
    out = bicriteria_simplify(tau, 10.0, 0.5, 0.25)
    assert out.m == 1


def test_vee_recovers_three_vertices():
    tau = sampled_vee(20)
    out = bicriteria_simplify(tau, 0.01, 0.34, 0.25)
    assert out.m == 3
    assert free_space_decision(out, tau, 1.25 * 0.01)


def test_blocks_tile_vertex_range():
    rng = np.random.default_rng(RNG_SEED + 1)
    steps = rng.normal(0, 0.12, (13, 2))
    tau = PolygonalCurve(np.cumsum(np.vstack([[0.0, 0.0], steps]), axis=0))
    ranges = []
    out = bicriteria_simplify(tau, 0.15, 0.34, 0.25, blocks_out=ranges)
    assert ranges[0][0] == 0
    assert ranges[-1][1] == tau.m - 1
    for (s, e) in ranges:
        assert 0 <= s <= e <= tau.m - 1
    for prev, nxt in zip(ranges, ranges[1:]):
        assert nxt[0] == prev[1] + 1
    assert free_space_decision(out, tau, 1.25 * 0.15)


def test_random_curves_meet_relaxed_tolerance():
    rng = np.random.default_rng(RNG_SEED + 2)
    for _ in range(4):
        steps = rng.normal(0, 0.1, (9, 2))
        tau = PolygonalCurve(np.cumsum(np.vstack([[0.0, 0.0], steps]),
                                       axis=0))
        delta = 0.12
        out = bicriteria_simplify(tau, delta, 0.5, 0.25)
        bound = 1.25 * delta
        assert free_space_decision(out, tau, bound)
        # densified discrete distance agrees within its own step error
        dd = discrete_frechet(densify(out, 0.02), densify(tau, 0.02))
        assert dd <= bound + 0.02


def test_parameter_validation():
    tau = curve((0, 0), (1, 0))
    with pytest.raises(ValueError):
        bicriteria_simplify(tau, 0.0, 0.5, 0.25)
    with pytest.raises(ValueError):
        bicriteria_simplify(tau, 0.2, 1.0, 0.25)
    with pytest.raises(ValueError):
        bicriteria_simplify(tau, 0.2, 0.5, 0.0)


def test_budget_exhaustion_propagates():
    tau = sampled_vee(10)
    with pytest.raises(BudgetExceeded):
        bicriteria_simplify(tau, 0.01, 0.34, 0.25, budget=1)
