"""Random-walk probabilities on the d-regular tree and on finite graphs.

The simple random walk on T_d reduces to a Markov chain on the distance from
the starting vertex: from distance m >= 1 it steps toward the root with
probability 1/d and away with probability (d-1)/d; from 0 it must step away.
The chain is tracked with exact integer walk counts over the denominator
d^k, so return and ball-hitting probabilities come out as exact rationals
even for walks of length several hundred.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import FiniteRegularGraph

__all__ = [
    "DistanceChainState",
    "distance_chain",
    "return_prob",
    "hit_ball_prob",
    "asymptote_check",
    "AsymptoteTable",
    "finite_walk_prob",
]


@dataclass
class DistanceChainState:
    """Exact distribution of the walk's distance from its start after `steps` steps.

    counts[m] is the number of length-`steps` walks in T_d ending at distance
    m, out of d**steps total; only distances sharing the parity of `steps`
    carry mass.
    """

    d: int
    steps: int
    counts: list[int]

    @property
    def denominator(self) -> int:
        return self.d**self.steps

    def probability(self, m: int) -> Fraction:
        if m < 0 or m > self.steps:
            return Fraction(0)
        return Fraction(self.counts[m], self.denominator)

    def probabilities(self) -> np.ndarray:
        """Float view of the distance distribution (indices 0..steps)."""
        den = self.denominator
        return np.array([c / den for c in self.counts], dtype=float)

    def step(self) -> "DistanceChainState":
        d = self.d
        n = self.steps + 1
        nxt = [0] * (n + 1)
        if self.counts[0]:
            nxt[1] += d * self.counts[0]
        for m in range(1, n):
            c = self.counts[m]
            if c:
                nxt[m - 1] += c
                nxt[m + 1] += (d - 1) * c
        return DistanceChainState(d=d, steps=n, counts=nxt)


def distance_chain(d: int, k: int) -> DistanceChainState:
    """Exact distance distribution of the length-k walk on T_d."""
    if d < 3:
        raise ValueError(f"distance_chain requires d >= 3, got d={d}")
    if k < 0:
        raise ValueError(f"walk length must be nonnegative, got {k}")
    state = DistanceChainState(d=d, steps=0, counts=[1])
    for _ in range(k):
        state = state.step()
    return state


def return_prob(d: int, k: int) -> Fraction:
    """Probability that the length-k walk on T_d ends where it started.

    Exact rational; zero for odd k by parity. Use float() for the 64-bit view.
    """
    return distance_chain(d, k).probability(0)


def hit_ball_prob(d: int, k: int, R: int) -> Fraction:
    """Probability that the length-k walk on T_d ends within distance R of its start.

    Monotone nondecreasing in R; equals return_prob(d, k) at R = 0 and 1 once
    R >= k.
    """
    if R < 0:
        raise ValueError(f"ball radius must be nonnegative, got R={R}")
    state = distance_chain(d, k)
    num = sum(state.counts[: min(R, k) + 1])
    return Fraction(num, state.denominator)


@dataclass
class AsymptoteTable:
    """Rows (k, r_2k, r_2k^(1/2k)) tracking convergence to 2 sqrt(d-1) / d."""

    d: int
    target: float
    ks: list[int]
    probs: list[Fraction]
    roots: list[float]

    @property
    def final_root(self) -> float:
        return self.roots[-1]

    @property
    def final_gap(self) -> float:
        return self.target - self.final_root

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.roots, self.roots[1:]))


def asymptote_check(d: int, k_max: int) -> AsymptoteTable:
    """Tabulate r_2k(root)^(1/2k) for k = 1..k_max against its limit 2 sqrt(d-1)/d.

    The 2k-th roots increase slowly (polynomial correction to the exponential
    rate), reaching within 0.02 of the limit around k_max = 150 for d = 3.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}")
    target = 2.0 * math.sqrt(d - 1) / d
    ks: list[int] = []
    probs: list[Fraction] = []
    roots: list[float] = []
    state = distance_chain(d, 0)
    log_d = math.log(d)
    for k in range(1, k_max + 1):
        state = state.step().step()
        count = state.counts[0]
        ks.append(k)
        probs.append(Fraction(count, d ** (2 * k)))
        # log of a big int is fine; Fraction -> float could underflow instead
        roots.append(math.exp((math.log(count) - 2 * k * log_d) / (2 * k)))
    return AsymptoteTable(d=d, target=target, ks=ks, probs=probs, roots=roots)


def finite_walk_prob(graph: FiniteRegularGraph, H, k: int) -> float:
    """Probability a length-k walk from a uniform vertex of H ends inside H.

    Dense matrix-vector iteration with the Markov operator A/d; intended for
    the desk-scale graphs used here (n up to a few thousand).
    """
    H = list(H)
    if not H:
        raise ValueError("H must be a nonempty vertex set")
    if k < 0:
        raise ValueError(f"walk length must be nonnegative, got {k}")
    n = graph.n
    if any(not 0 <= u < n for u in H):
        raise ValueError("H contains vertices outside the graph")
    A = np.zeros((n, n))
    for u, nbrs in enumerate(graph.adjacency):
        for v in nbrs:
            A[u, v] += 1.0
    x = np.zeros(n)
    x[H] = 1.0
    for _ in range(k):
        x = A @ x / graph.d
    return float(x[H].sum() / len(H))
