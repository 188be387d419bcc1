"""Monte Carlo correlation estimates for local rules, and the ball-sum closed forms.

The distance-k correlation of a rule's output is estimated on a tree patch
(two radius-r balls around the endpoints of a length-k path): each sample is
a fresh i.i.d. labeling of the patch, and the outputs at the two endpoints
feed a plug-in Pearson estimator. Sampling runs in 100 seeded chunks; the
result is a deterministic function of (seed, chunk count) no matter how the
chunks are scheduled.

For the ball-sum rule the correlation is an overlap ratio with an exact
rational value: |S_r(v) cap S_r(w)| / |S_r(v)|, which evaluates to
(d(d-1)^(r-k/2) - 2) / (d(d-1)^r - 2) for even k <= 2r and
2((d-1)^(r-(k-1)/2) - 1) / (d(d-1)^r - 2) for odd k <= 2r+1, and to 0 once
the balls are disjoint. As r grows these tend to (d-1)^(-k/2) and
(2/d)(d-1)^(-(k-1)/2).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .chebyshev import corr_bound
from .graphs import FiniteRegularGraph, TreePatch, build_tree_patch, girth
from .rules import LocalRule, _draw_labels, ball_indices, ball_shape

__all__ = [
    "EstimateWithError",
    "DegenerateOutputError",
    "mc_correlation",
    "ballsum_corr_exact",
    "ballsum_limits",
    "BoundCheckReport",
    "bound_check",
    "GraphTreeReport",
    "graph_vs_tree_check",
]

DEFAULT_CHUNKS = 100


class DegenerateOutputError(RuntimeError):
    """The rule produced zero-variance outputs, so correlation is undefined."""


@dataclass
class EstimateWithError:
    """Point estimate with its Monte Carlo standard error."""

    estimate: float
    se: float
    samples: int
    seed: int

    def within(self, target: float, sigmas: float = 4.0) -> bool:
        return abs(self.estimate - target) <= sigmas * self.se


def _chunk_sizes(samples: int, chunks: int) -> list[int]:
    base, extra = divmod(samples, chunks)
    return [base + (1 if i < extra else 0) for i in range(chunks)]


def _run_chunks(fn, n_chunks: int, workers: int) -> list:
    """Evaluate fn(chunk_index) for every chunk, in chunk order.

    Results are aggregated by index, so the output does not depend on the
    worker count.
    """
    if workers <= 1:
        return [fn(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_chunks)))


def _pearson(xs: np.ndarray, ys: np.ndarray, samples: int, seed: int) -> EstimateWithError:
    sx = float(xs.std())
    sy = float(ys.std())
    if sx == 0.0 or sy == 0.0:
        raise DegenerateOutputError(
            "rule outputs have zero variance; correlation is undefined"
        )
    products = (xs - xs.mean()) * (ys - ys.mean()) / (sx * sy)
    est = float(products.mean())
    se = float(products.std(ddof=1) / math.sqrt(len(products)))
    return EstimateWithError(estimate=est, se=se, samples=samples, seed=seed)


def _endpoint_outputs(
    rule: LocalRule,
    patch: TreePatch,
    sizes: list[int],
    seed: int,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample rule outputs at both patch endpoints, chunked and seeded."""
    shape = ball_shape(patch.d, rule.r)
    order_v = ball_indices(patch, patch.v, rule.r)
    order_w = ball_indices(patch, patch.w, rule.r)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def one_chunk(i: int) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(children[i])
        labels = _draw_labels(rng, rule.label_model, (sizes[i], patch.n))
        ys_v = rule.outputs(labels[:, order_v], shape)
        ys_w = rule.outputs(labels[:, order_w], shape)
        return ys_v, ys_w

    results = _run_chunks(one_chunk, len(sizes), workers)
    xs = np.concatenate([r[0] for r in results])
    ys = np.concatenate([r[1] for r in results])
    return xs, ys


def mc_correlation(
    rule: LocalRule,
    d: int,
    k: int,
    samples: int,
    seed: int = 0,
    chunks: int = DEFAULT_CHUNKS,
    workers: int = 1,
) -> EstimateWithError:
    """Monte Carlo correlation of a rule's outputs at two vertices of distance k.

    Builds the tree patch for (d, k, rule.r), draws `samples` independent
    labelings, and returns the plug-in Pearson correlation of the endpoint
    outputs; the standard error is the sample SD of the standardized products
    over sqrt(samples). Deterministic per (seed, chunks).
    """
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")
    patch = build_tree_patch(d, k, rule.r)
    sizes = _chunk_sizes(samples, min(chunks, samples))
    xs, ys = _endpoint_outputs(rule, patch, sizes, seed, workers)
    return _pearson(xs, ys, samples, seed)


def ballsum_corr_exact(d: int, r: int, k: int) -> Fraction:
    """Exact distance-k correlation of the radius-r ball-sum rule on T_d.

    Equals the overlap ratio |S_r(v) cap S_r(w)| / |S_r(v)|; zero once the
    balls are disjoint (even k > 2r, odd k > 2r+1), one at k = 0.
    """
    if d < 3:
        raise ValueError(f"ballsum_corr_exact requires d >= 3, got d={d}")
    if r < 0 or k < 0:
        raise ValueError("r and k must be nonnegative")
    if k == 0:
        return Fraction(1)
    den = d * (d - 1) ** r - 2
    if k % 2 == 0:
        if k <= 2 * r:
            return Fraction(d * (d - 1) ** (r - k // 2) - 2, den)
        return Fraction(0)
    if k <= 2 * r + 1:
        return Fraction(2 * ((d - 1) ** (r - (k - 1) // 2) - 1), den)
    return Fraction(0)


def ballsum_limits(d: int, k: int) -> float:
    """Large-radius limit of the ball-sum correlation at distance k.

    (d-1)^(-k/2) for even k; (2/d)(d-1)^(-(k-1)/2) for odd k. The even limit
    is within a factor (k+1-2k/d) of the general upper bound.
    """
    if d < 3:
        raise ValueError(f"ballsum_limits requires d >= 3, got d={d}")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k % 2 == 0:
        return float((d - 1) ** (-k / 2))
    return float(2 / d * (d - 1) ** (-(k - 1) / 2))


@dataclass
class BoundCheckReport:
    rule_name: str
    d: int
    k: int
    estimate: EstimateWithError
    bound: float
    margin: float
    passed: bool


def bound_check(
    rule: LocalRule,
    d: int,
    k: int,
    samples: int,
    seed: int = 0,
    workers: int = 1,
) -> BoundCheckReport:
    """Check a measured |correlation| against the universal bound (k+1-2k/d)(d-1)^(-k/2).

    Passes when |estimate| <= bound + 4*SE; the margin (bound - |estimate|)
    is reported either way. Zero-variance rules are rejected.
    """
    est = mc_correlation(rule, d, k, samples, seed, workers=workers)
    bound = corr_bound(d, k)
    margin = bound - abs(est.estimate)
    return BoundCheckReport(
        rule_name=rule.name,
        d=d,
        k=k,
        estimate=est,
        bound=bound,
        margin=margin,
        passed=abs(est.estimate) <= bound + 4.0 * est.se,
    )


@dataclass
class GraphTreeReport:
    rule_name: str
    k: int
    graph_estimate: EstimateWithError
    tree_estimate: EstimateWithError
    difference: float
    tolerance: float
    passed: bool


def _vertices_at_distance(graph: FiniteRegularGraph, u: int, k: int) -> list[int]:
    dist = {u: 0}
    frontier = [u]
    for _ in range(k):
        nxt = []
        for x in frontier:
            for y in graph.adjacency[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return frontier


def graph_vs_tree_check(
    rule: LocalRule,
    graph: FiniteRegularGraph,
    k: int,
    samples: int,
    seed: int = 0,
    pairs: int = 1000,
) -> GraphTreeReport:
    """Compare a rule's distance-k correlation on a finite graph to the tree value.

    Requires girth(graph) >= k + 2*rule.r + 2, the regime where both endpoint
    balls are trees and the joint output distribution matches the one on T_d.
    Samples vertex pairs at distance exactly k, labels only the union of
    their balls (fresh labels per sample), and checks agreement with the
    tree-patch Monte Carlo within 4 combined standard errors.
    """
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")
    needed = k + 2 * rule.r + 2
    g = girth(graph)
    if g < needed:
        raise ValueError(
            f"girth {g} is too small: distance-{k} comparison with a radius-"
            f"{rule.r} rule needs girth >= {needed}"
        )

    root_seq, tree_seq = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(root_seq)
    shape = ball_shape(graph.d, rule.r)

    pairs = min(pairs, samples)
    per_pair = _chunk_sizes(samples, pairs)
    xs_parts: list[np.ndarray] = []
    ys_parts: list[np.ndarray] = []
    for i in range(pairs):
        u = int(rng.integers(graph.n))
        at_k = _vertices_at_distance(graph, u, k)
        w = int(at_k[rng.integers(len(at_k))])
        order_u = ball_indices(graph, u, rule.r)
        order_w = ball_indices(graph, w, rule.r)
        union = np.unique(np.concatenate([order_u, order_w]))
        col_u = np.searchsorted(union, order_u)
        col_w = np.searchsorted(union, order_w)
        labels = _draw_labels(rng, rule.label_model, (per_pair[i], len(union)))
        xs_parts.append(rule.outputs(labels[:, col_u], shape))
        ys_parts.append(rule.outputs(labels[:, col_w], shape))

    graph_est = _pearson(
        np.concatenate(xs_parts), np.concatenate(ys_parts), samples, seed
    )
    tree_seed = int(tree_seq.generate_state(1)[0])
    tree_est = mc_correlation(rule, graph.d, k, samples, seed=tree_seed)

    difference = abs(graph_est.estimate - tree_est.estimate)
    tolerance = 4.0 * math.hypot(graph_est.se, tree_est.se)
    return GraphTreeReport(
        rule_name=rule.name,
        k=k,
        graph_estimate=graph_est,
        tree_estimate=tree_est,
        difference=difference,
        tolerance=tolerance,
        passed=difference <= tolerance,
    )
