"""Spectral gap of finite regular graphs on the mean-zero subspace.

rho(G) is the operator norm of the adjacency matrix restricted to vectors
orthogonal to the constants; a d-regular graph is Ramanujan when
rho(G) <= 2*sqrt(d-1). rho is estimated by power iteration on the squared
operator (so the extreme eigenvalue is positive even for bipartite graphs,
where -d lives in the mean-zero subspace), with the mean projected out at
every step, and can also be bounded from below through return probabilities
of vertex subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import FiniteRegularGraph

__all__ = [
    "SpectralReport",
    "PowerIterationError",
    "rho_estimate",
    "is_ramanujan",
    "rho_via_subsets",
]


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge; carries the last residual."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass
class SpectralReport:
    d: int
    n: int
    rho_estimate: float
    ramanujan_threshold: float
    is_ramanujan: bool
    iterations: int
    residual: float


def _adjacency_csr(graph: FiniteRegularGraph):
    deg = np.fromiter((len(a) for a in graph.adjacency), dtype=np.int64, count=graph.n)
    idx = np.fromiter(
        (v for nbrs in graph.adjacency for v in nbrs),
        dtype=np.int64,
        count=int(deg.sum()),
    )
    ptr = np.concatenate(([0], np.cumsum(deg)))
    return idx, ptr


def _power_iteration(graph, max_iters, tol, seed):
    """Power iteration for A^2 on the mean-zero subspace.

    Returns (rho, iterations, residual, converged), where rho is the final
    Rayleigh-quotient estimate sqrt(v' A^2 v) and residual = |A^2 v - rho^2 v|.
    """
    idx, ptr = _adjacency_csr(graph)

    def matvec(x):
        return np.add.reduceat(x[idx], ptr[:-1])

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(graph.n)
    v -= v.mean()
    norm = float(np.linalg.norm(v))
    if norm == 0:
        raise ValueError("graph has a single vertex; mean-zero subspace is empty")
    v /= norm

    theta_prev = math.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        w = matvec(v)
        w -= w.mean()
        w = matvec(w)
        w -= w.mean()
        theta = float(v @ w)          # Rayleigh quotient for A^2 on mean-zero
        norm = float(np.linalg.norm(w))
        if norm == 0:                 # whole mean-zero spectrum of A^2 is 0
            return 0.0, iterations, 0.0, True
        v = w / norm
        if abs(theta - theta_prev) <= tol * max(1.0, abs(theta)):
            converged = True
            break
        theta_prev = theta

    Av = matvec(v)
    Av -= Av.mean()
    rho = float(np.linalg.norm(Av))
    A2v = matvec(Av)
    A2v -= A2v.mean()
    residual = float(np.linalg.norm(A2v - (rho * rho) * v))
    return rho, iterations, residual, converged


def rho_estimate(
    graph: FiniteRegularGraph,
    max_iters: int = 20000,
    tol: float = 1e-10,
    seed: int = 0,
) -> float:
    """Largest |eigenvalue| of the adjacency operator on mean-zero vectors.

    Disconnected graphs are rejected: each extra component contributes a
    piecewise-constant eigenvector with eigenvalue d inside the mean-zero
    subspace, so rho degenerates to d.
    """
    if not graph.is_connected():
        raise ValueError("rho_estimate requires a connected graph")
    rho, iterations, residual, converged = _power_iteration(graph, max_iters, tol, seed)
    if not converged:
        raise PowerIterationError(
            f"power iteration did not converge in {max_iters} iterations "
            f"(residual {residual:.3e})",
            residual=residual,
            iterations=iterations,
        )
    return rho


def is_ramanujan(
    graph: FiniteRegularGraph,
    tol: float = 1e-6,
    max_iters: int = 20000,
    iter_tol: float = 1e-10,
    seed: int = 0,
) -> SpectralReport:
    """Test rho(G) <= 2*sqrt(d-1) + tol; returns the full spectral report.

    Equality counts as Ramanujan (relevant for d = 2, where every cycle sits
    exactly on the threshold 2*sqrt(1) = 2).
    """
    if not graph.is_connected():
        raise ValueError("is_ramanujan requires a connected graph")
    rho, iterations, residual, converged = _power_iteration(
        graph, max_iters, iter_tol, seed
    )
    if not converged:
        raise PowerIterationError(
            f"power iteration did not converge in {max_iters} iterations "
            f"(residual {residual:.3e})",
            residual=residual,
            iterations=iterations,
        )
    threshold = 2.0 * math.sqrt(graph.d - 1)
    return SpectralReport(
        d=graph.d,
        n=graph.n,
        rho_estimate=rho,
        ramanujan_threshold=threshold,
        is_ramanujan=rho <= threshold + tol,
        iterations=iterations,
        residual=residual,
    )


def rho_via_subsets(graph: FiniteRegularGraph, k_max: int = 40) -> float:
    """Lower bound on rho from return probabilities of vertex subsets.

    rho(G) = d * sup over nonempty proper subsets H and walk lengths k of
    |p_k(H) - nu(H)| / (1 - nu(H)), all to the power 1/k, where p_k(H) is the
    chance a length-k walk from a uniform vertex of H ends in H. Exhausts all
    2^n - 2 subsets, so n is capped at 16; the truncated supremum never
    exceeds rho and approaches it as k_max grows.
    """
    n = graph.n
    if n > 16:
        raise ValueError(f"subset formula is exhaustive; n={n} exceeds the cap of 16")
    if not 1 <= k_max <= 50:
        raise ValueError(f"k_max must be in 1..50, got {k_max}")

    A = np.zeros((n, n))
    for u, nbrs in enumerate(graph.adjacency):
        for v in nbrs:
            A[u, v] += 1.0
    M = A / graph.d

    masks = np.arange(1, 2**n - 1, dtype=np.int64)  # proper nonempty subsets
    B = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    sizes = B.sum(axis=1)
    nu = sizes / n

    # |p_k - nu| decays like (rho/d)^k; once it falls below the rounding
    # noise of k dense matmuls its k-th root would drift toward 1 and the
    # product toward d. Sub-floor terms are dropped: their true values are
    # bounded by surviving terms, so the sup stays a valid lower bound.
    noise_floor = 1e-6

    best = 0.0
    Mk = np.eye(n)
    for k in range(1, k_max + 1):
        Mk = Mk @ M
        quad = np.einsum("ij,jl,il->i", B, Mk, B)  # 1_H^T M^k 1_H per subset
        p_k = quad / sizes
        ratio = np.abs(p_k - nu) / (1.0 - nu)
        ratio = ratio[ratio >= noise_floor]
        if len(ratio):
            best = max(best, float(np.max(ratio) ** (1.0 / k)))
    return graph.d * best
