"""Bicriteria curve simplification.

Greedy prefix maximization: each block covers the longest curve prefix
admitting a curve of at most ceil(1/alpha) vertices within delta, found
with the feasibility solver, and consecutive blocks are chained by a
straight join edge.  The join is safe because both of its endpoints land
within (1+eps)*delta of consecutive curve vertices, so interpolating the
join against the skipped curve edge never exceeds that bound.  The result
trades at most a (1+alpha) factor in vertex count against the best
achievable at delta while keeping its own distance within (1+eps)*delta.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional

import numpy as np

from .frechet import PolygonalCurve, free_space_decision
from .twophase import QInstance, solve_Q


def _block_solution(tau: PolygonalCurve, s: int, e: int, delta: float,
                    ell_blk: int, eps: float, budget: int,
                    threads: Optional[int]) -> Optional[PolygonalCurve]:
    piece = tau.subcurve(s, e)
    inst = QInstance(curves=[piece], thresholds=[delta], ell=ell_blk,
                     eps=eps)
    return solve_Q(inst, budget=budget, threads=threads)


def bicriteria_simplify(tau: PolygonalCurve, delta: float, alpha: float,
                        eps: float, budget: int = 10 ** 7,
                        threads: Optional[int] = None,
                        blocks_out: Optional[List] = None) -> PolygonalCurve:
    """Return a curve within (1+eps)*delta of tau built from greedy blocks
    of at most ceil(1/alpha) vertices each.

    budget caps the work of each feasibility query; BudgetExceeded
    propagates to the caller.  The prefix search doubles a stride and then
    bisects, which assumes prefix feasibility is monotone in the prefix
    length; if the memoized answers ever contradict that, the search falls
    back to a plain linear scan.  Passing a list as blocks_out records the
    inclusive vertex index range of tau covered by each block.
    """
    if not (delta > 0 and math.isfinite(delta)):
        raise ValueError("delta must be positive and finite")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    ell_blk = int(math.ceil(1.0 / alpha - 1e-12))
    m = tau.m
    if m <= 1:
        return PolygonalCurve(tau.vertices.copy())

    blocks: List[PolygonalCurve] = []
    s = 0
    while s < m - 1:
        memo: Dict[int, Optional[PolygonalCurve]] = {}

        def feasible(e: int) -> bool:
            if e not in memo:
                memo[e] = _block_solution(tau, s, e, delta, ell_blk, eps,
                                          budget, threads)
            return memo[e] is not None

        lo = s + 1
        if not feasible(lo):
            # a single curve edge is always its own solution; tolerate a
            # refusal anyway by emitting the edge verbatim
            blocks.append(tau.subcurve(s, lo))
            if blocks_out is not None:
                blocks_out.append((s, lo))
            s = lo + 1
        else:
            hi: Optional[int] = None
            stride = 1
            while hi is None and lo < m - 1:
                nxt = min(lo + stride, m - 1)
                if feasible(nxt):
                    lo = nxt
                    stride *= 2
                else:
                    hi = nxt
            if hi is not None:
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if feasible(mid):
                        lo = mid
                    else:
                        hi = mid
            if any(e > lo and r is not None for e, r in memo.items()):
                # feasibility was not monotone here; rescan linearly
                lo = s + 1
                while lo + 1 <= m - 1 and feasible(lo + 1):
                    lo += 1
            blocks.append(memo[lo])
            if blocks_out is not None:
                blocks_out.append((s, lo))
            s = lo + 1
        if s == m - 1:
            # suffix degenerated to the final vertex; close with a point
            blocks.append(PolygonalCurve(tau.vertices[m - 1:m].copy()))
            if blocks_out is not None:
                blocks_out.append((m - 1, m - 1))
            break

    parts = [blocks[0].vertices]
    for blk in blocks[1:]:
        cur = blk.vertices
        if np.array_equal(parts[-1][-1], cur[0]):
            cur = cur[1:]
        if cur.shape[0]:
            parts.append(cur)
    sigma = PolygonalCurve(np.vstack(parts))
    assert free_space_decision(sigma, tau, (1.0 + eps) * delta)
    return sigma
