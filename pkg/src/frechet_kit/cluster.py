"""(k,l)-median clustering of polygonal curves.

The candidate finder samples a multiset of input curves, derives an upper
and a lower bound on useful error thresholds from a rough median of each
sampled sub-multiset, and collects curves built by the feasibility solver
over small curve subsets and threshold grids.  The final stage scores all
k-subsets of the candidate set against the full input and keeps the
cheapest one.

Desk-scale guards: every enumeration (sub-multisets, curve subsets,
threshold vectors) is capped, and the driver refuses up front when the
estimated number of solver invocations exceeds its cap.  Capped
enumerations fall back to seeded sampling or a geometric threshold ladder
and are flagged as such in the returned provenance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetExceeded, EmptyInput
from .frechet import PolygonalCurve, discrete_frechet, frechet_distance, \
    pad_curve
from .simplify import bicriteria_simplify
from .twophase import QInstance, solve_Q

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class FinderParams:
    """Inputs of the candidate finder; the sample size is derived, never
    stored."""

    ell: int
    beta: float
    mu: float
    eps: float
    seed: int = 0

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if self.beta < 1.0:
            raise ValueError("beta must be >= 1")
        if not (0.0 < self.mu < 1.0):
            raise ValueError("mu must lie in (0, 1)")
        if not (0.0 < self.eps < 1.0):
            raise ValueError("eps must lie in (0, 1)")


@dataclass(eq=False)
class CandidateSet:
    """Curves produced by the finder, each with exactly ell vertices, plus
    per-curve provenance and set-level fallback flags."""

    ell: int
    curves: List[PolygonalCurve] = field(default_factory=list)
    provenance: List[Dict] = field(default_factory=list)
    flags: Dict[str, bool] = field(default_factory=dict)

    def add(self, curve: PolygonalCurve, prov: Dict) -> None:
        if curve.m != self.ell:
            raise ValueError("candidate must have exactly ell vertices")
        self.curves.append(curve)
        self.provenance.append(prov)


def sample_size(params: FinderParams) -> int:
    """Number of curves sampled with replacement by the finder."""
    return int(math.ceil(80.0 * params.beta * params.ell / params.eps
                         * math.log(80.0 * params.ell / params.mu)))


def x_size(y_size: int, beta: float) -> int:
    """Size of each sampled sub-multiset: |Y|/(2*beta), nearest integer,
    at least one."""
    return max(1, int(round(y_size / (2.0 * beta))))


def upper_threshold(ell: int, eps: float, cost_val: float) -> float:
    return 10.0 * ell / (eps * eps) * cost_val


def lower_threshold(eps: float, mu: float, x_sz: int,
                    cost_val: float) -> float:
    return eps * mu / (34.0 * x_sz) * cost_val


def threshold_grid(U: float, L: float, cap: int = 10 ** 6) -> np.ndarray:
    """Integral multiples of L from L up to ceil(U/L)*L."""
    if L <= 0.0:
        return np.zeros(0)
    count = int(math.ceil(U / L))
    if count > cap:
        raise BudgetExceeded(
            "threshold grid of %d values exceeds the cap %d" % (count, cap),
            spent=count)
    return L * np.arange(1, count + 1, dtype=float)


def cost(T: Sequence[PolygonalCurve], Sigma: Sequence[PolygonalCurve],
         tol: float = DEFAULT_TOL) -> float:
    """Sum over inputs of the distance to the nearest center."""
    if not Sigma:
        raise EmptyInput("need at least one center")
    total = 0.0
    for tau in T:
        total += min(frechet_distance(sig, tau, tol=tol).value
                     for sig in Sigma)
    return total


def _dedup_with_counts(X: Sequence[PolygonalCurve]
                       ) -> Tuple[List[PolygonalCurve], np.ndarray]:
    seen: Dict[int, int] = {}
    distinct: List[PolygonalCurve] = []
    counts: List[int] = []
    for c in X:
        pos = seen.get(id(c))
        if pos is None:
            seen[id(c)] = len(distinct)
            distinct.append(c)
            counts.append(1)
        else:
            counts[pos] += 1
    return distinct, np.array(counts, dtype=float)


def _weighted_cost(distinct: Sequence[PolygonalCurve], weights: np.ndarray,
                   center: PolygonalCurve, tol: float) -> float:
    return float(sum(
        w * frechet_distance(center, tau, tol=tol).value
        for tau, w in zip(distinct, weights)))


def _fit_to_ell(curve: PolygonalCurve, ell: int) -> PolygonalCurve:
    """Exactly ell vertices: pad by longest-edge midpoints, or keep ell
    evenly spread vertices (always including both endpoints)."""
    if curve.m == ell:
        return curve
    if curve.m < ell:
        return pad_curve(curve, ell)
    idx = np.unique(np.round(np.linspace(0, curve.m - 1, ell)).astype(int))
    picked = PolygonalCurve(curve.vertices[idx].copy())
    if picked.m < ell:
        picked = pad_curve(picked, ell)
    return picked


def median34_standin(X: Sequence[PolygonalCurve], ell: int, mu: float,
                     rng: Optional[np.random.Generator] = None,
                     tol: float = DEFAULT_TOL) -> PolygonalCurve:
    """Heuristic single-center pick, NOT a 34-approximation.

    Simplifies each member of a small random subsample at a median
    pairwise-distance scale, forces exactly ell vertices, and returns the
    candidate of least summed distance to X.  Callers must validate the
    derived threshold brackets on their own instances.
    """
    if not X:
        raise EmptyInput("X must be non-empty")
    if rng is None:
        rng = np.random.default_rng(0)
    distinct, weights = _dedup_with_counts(X)
    size = min(len(X), int(math.ceil(8.0 * math.log(4.0 / mu))))
    pick = np.sort(rng.choice(len(X), size=size, replace=False))
    sub = [X[int(i)] for i in pick]

    # scale estimate: median pairwise discrete distance of the subsample
    pair_vals = [discrete_frechet(a, b)
                 for a, b in itertools.combinations(sub, 2)]
    delta_hat = float(np.median(pair_vals)) if pair_vals else 0.0

    # repeated sample entries are the same object and yield the same
    # candidate, so simplify each one once
    cands: List[PolygonalCurve] = []
    done = set()
    for tau in sub:
        if id(tau) in done:
            continue
        done.add(id(tau))
        if delta_hat > 0.0 and ell >= 2:
            simp = bicriteria_simplify(tau, delta_hat, 1.0 / ell, 0.25)
        else:
            simp = tau
        cands.append(_fit_to_ell(simp, ell))
    best = None
    best_val = math.inf
    for cand in cands:
        val = _weighted_cost(distinct, weights, cand, tol)
        if val < best_val - 1e-15:
            best = cand
            best_val = val
    return best


def _multiset_count(universe: int, size: int) -> int:
    return math.comb(universe + size - 1, size)


def _subset_count(universe: int, max_size: int) -> int:
    return sum(math.comb(universe, s)
               for s in range(1, min(universe, max_size) + 1))


def _delta_ladder(count: int) -> List[int]:
    # geometric ladder of grid positions 1, 2, 4, ..., plus the top value
    out = []
    b = 1
    while b < count:
        out.append(b)
        b *= 2
    out.append(count)
    return out


LADDER_MAX = 64  # ladder length is log2(grid size) <= 64 always


def candidate_finder(T: Sequence[PolygonalCurve], params: FinderParams,
                     budget: int = 10 ** 7, x_cap: int = 4,
                     w_cap: int = 48, delta_cap: int = 64,
                     call_cap: int = 200000, tol: float = DEFAULT_TOL,
                     threads: Optional[int] = None) -> CandidateSet:
    """Collect candidate center curves with exactly params.ell vertices.

    Enumerations above their caps switch to flagged fallbacks: sampled
    sub-multisets, sampled curve subsets, and a geometric threshold ladder
    instead of the full per-curve grid product.  The finder refuses with
    BudgetExceeded when the capped loop product still estimates more
    solver invocations than call_cap.  budget caps each individual solver
    invocation.
    """
    if not T:
        raise EmptyInput("need at least one input curve")
    ell = params.ell
    rng = np.random.default_rng(params.seed)
    out = CandidateSet(ell=ell)
    out.flags = {"x_sampling_fallback": False, "w_truncation_fallback": False,
                 "delta_ladder_fallback": False}

    y_sz = sample_size(params)
    y_idx = rng.integers(0, len(T), size=y_sz)
    x_sz = x_size(y_sz, params.beta)

    total_x = _multiset_count(y_sz, x_sz)
    if total_x > x_cap:
        out.flags["x_sampling_fallback"] = True
        x_list = [tuple(np.sort(rng.integers(0, y_sz, size=x_sz)))
                  for _ in range(x_cap)]
    else:
        x_list = list(itertools.combinations_with_replacement(
            range(y_sz), x_sz))

    pairs = [(l, h) for l in range(1, ell + 1) for h in range(1, l + 1)]

    # refuse up front when the capped loops still estimate too many solves
    est = 0
    for l, h in pairs:
        n_w = min(_subset_count(len(T), 3 * l + 2 * h), w_cap)
        est += n_w * max(delta_cap, LADDER_MAX)
    est *= len(x_list)
    if est > call_cap:
        raise BudgetExceeded(
            "estimated %d solver invocations exceed the cap %d"
            % (est, call_cap), spent=est)

    seen_keys = set()

    def add_candidate(curve: PolygonalCurve, prov: Dict) -> None:
        key = tuple(np.round(curve.vertices, 9).ravel())
        if key in seen_keys:
            return
        seen_keys.add(key)
        out.add(curve, prov)

    for xi, x_pos in enumerate(x_list):
        t_idx = [int(y_idx[p]) for p in x_pos]
        x_curves = [T[i] for i in t_idx]
        distinct, weights = _dedup_with_counts(x_curves)
        dis_idx = sorted(set(t_idx))

        c = median34_standin(x_curves, ell, params.mu / 4.0, rng=rng,
                             tol=tol)
        add_candidate(c, {"source": "median34", "x": xi})

        cost_xc = _weighted_cost(distinct, weights, c, tol)
        if cost_xc <= 0.0:
            continue
        U = upper_threshold(ell, params.eps, cost_xc)
        L = lower_threshold(params.eps, params.mu, x_sz, cost_xc)
        grid_count = int(math.ceil(U / L))

        for l, h in pairs:
            # smallest subsets first so a truncated list still covers
            # every curve on its own
            max_w = 3 * l + 2 * h
            n_subsets = _subset_count(len(dis_idx), max_w)
            w_list = []
            for s in range(1, min(len(dis_idx), max_w) + 1):
                w_list.extend(itertools.combinations(dis_idx, s))
                if n_subsets > w_cap and len(w_list) >= w_cap:
                    break
            if n_subsets > w_cap:
                out.flags["w_truncation_fallback"] = True
                w_list = w_list[:w_cap]

            for w in w_list:
                if grid_count ** len(w) > delta_cap:
                    out.flags["delta_ladder_fallback"] = True
                    deltas = [(b,) * len(w) for b in _delta_ladder(grid_count)]
                else:
                    deltas = list(itertools.product(
                        range(1, grid_count + 1), repeat=len(w)))
                for bvec in deltas:
                    thr = [b * L for b in bvec]
                    inst = QInstance(curves=[T[i] for i in w],
                                     thresholds=thr, ell=h,
                                     eps=params.eps ** 2)
                    sig = solve_Q(inst, budget=budget, threads=threads)
                    if sig is None:
                        continue
                    add_candidate(pad_curve(sig, ell),
                                  {"source": "twophase", "x": xi, "l": l,
                                   "h": h, "w": tuple(w),
                                   "delta": tuple(thr)})
    return out


def kl_median(T: Sequence[PolygonalCurve], k: int, ell: int, mu: float,
              eps: float, seed: int = 0, budget: int = 10 ** 7,
              beta_override: Optional[float] = None,
              finder_kwargs: Optional[Dict] = None,
              tol: float = DEFAULT_TOL,
              details: Optional[Dict] = None) -> List[PolygonalCurve]:
    """Pick k center curves of ell vertices with near-minimal summed
    distance to T.

    beta is max(4k^2/eps + 2k + 1, 1) unless beta_override scales it down
    explicitly for desk-scale runs.  All k-subsets of the candidate set are
    scored exhaustively; ties break toward the lexicographically first
    subset in candidate order.  Passing a dict as `details` records the
    finder's fallback flags, the candidate count, and the winning cost.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not T:
        raise EmptyInput("need at least one input curve")
    beta = beta_override if beta_override is not None \
        else max(4.0 * k * k / eps + 2.0 * k + 1.0, 1.0)
    params = FinderParams(ell=ell, beta=float(beta), mu=mu, eps=eps,
                          seed=seed)
    cands = candidate_finder(T, params, budget=budget,
                             **(finder_kwargs or {}))
    sigma = cands.curves
    if not sigma:
        raise EmptyInput("candidate finder produced no curves")

    dist = np.empty((len(T), len(sigma)))
    for i, tau in enumerate(T):
        for j, sig in enumerate(sigma):
            dist[i, j] = frechet_distance(sig, tau, tol=tol).value

    size = min(k, len(sigma))
    best_idx: Optional[Tuple[int, ...]] = None
    best_val = math.inf
    for comb in itertools.combinations(range(len(sigma)), size):
        val = float(dist[:, comb].min(axis=1).sum())
        if val < best_val - 1e-15:
            best_val = val
            best_idx = comb
    chosen = [sigma[j] for j in best_idx]
    while len(chosen) < k:
        chosen.append(chosen[-1])
    if details is not None:
        details["flags"] = dict(cands.flags)
        details["n_candidates"] = len(sigma)
        details["cost"] = best_val
    return chosen
