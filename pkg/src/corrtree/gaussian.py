"""Distance kernels, Gaussian sampling on tree patches, and the CLT check.

A distance kernel p assigns a correlation to every vertex distance, with
p(0) = 1. Restricted to a finite tree patch it induces a Gram matrix
G[u, v] = p(dist(u, v)), which must be positive semi-definite for p to be a
genuine correlation structure; sampling the Gaussian process with that
covariance is then a Cholesky factorization away. Normalized sums of n
independent copies of any rule's output keep the correlation structure while
their marginals turn Gaussian, which `clt_convergence` measures through the
excess kurtosis.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .chebyshev import CorrelationSequence
from .correlation import (
    EstimateWithError,
    _chunk_sizes,
    _pearson,
    ballsum_corr_exact,
    mc_correlation,
)
from .graphs import TreePatch, build_tree_patch
from .rules import LocalRule, _draw_labels, ball_indices, ball_shape

__all__ = [
    "DistanceKernel",
    "gram_matrix",
    "psd_check",
    "sample_gaussian",
    "CltReport",
    "clt_convergence",
]


@dataclass
class DistanceKernel:
    """Correlation by distance: values[k] = p(k), with p(0) = 1 and |p| <= 1."""

    d: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) == 0:
            raise ValueError("kernel needs a 1-d array of values")
        if abs(self.values[0] - 1.0) > 1e-12:
            raise ValueError("a distance kernel has p(0) = 1")
        if np.any(np.abs(self.values) > 1.0 + 1e-12):
            raise ValueError("kernel values must lie in [-1, 1]")

    @property
    def K(self) -> int:
        return len(self.values) - 1

    @classmethod
    def from_sequence(cls, seq: CorrelationSequence) -> "DistanceKernel":
        return cls(d=seq.d, values=seq.values.copy())


def _pairwise_distances(patch: TreePatch) -> np.ndarray:
    n = patch.n
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for v in patch.adjacency[u]:
                if dist[s, v] == -1:
                    dist[s, v] = dist[s, u] + 1
                    q.append(v)
    if np.any(dist < 0):
        # k > 2r+1 splits the patch into the two balls; a cross pair's tree
        # geodesic runs along the (pruned) v-w path, so its length is
        # recoverable from the stored endpoint distances
        dv = np.asarray(patch.dist_v)
        dw = np.asarray(patch.dist_w)
        in_v = dv <= patch.r
        cross = dw[:, None] + dv[None, :] - patch.k
        cross = np.where(in_v[:, None], cross, cross.T)
        dist = np.where(dist < 0, cross, dist)
    return dist


def gram_matrix(kernel: DistanceKernel, patch: TreePatch) -> np.ndarray:
    """Matrix of kernel values at all pairwise patch distances.

    Symmetric with unit diagonal; fails if the patch diameter exceeds the
    kernel's range.
    """
    dist = _pairwise_distances(patch)
    diameter = int(dist.max())
    if diameter > kernel.K:
        raise ValueError(
            f"patch diameter {diameter} exceeds kernel range K={kernel.K}"
        )
    return kernel.values[dist]


def psd_check(matrix: np.ndarray, tol: float = 1e-8) -> tuple[float, bool]:
    """Minimum eigenvalue of a symmetric matrix and whether it clears -tol."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("psd_check needs a square matrix")
    if not np.allclose(matrix, matrix.T, atol=1e-12):
        raise ValueError("psd_check needs a symmetric matrix")
    min_eig = float(np.linalg.eigvalsh(matrix)[0])
    return min_eig, min_eig >= -tol


def sample_gaussian(
    kernel: DistanceKernel,
    patch: TreePatch,
    n_samples: int,
    seed: int = 0,
    jitter: float = 1e-10,
) -> np.ndarray:
    """Draw n_samples Gaussian vectors on the patch with covariance p(dist).

    The Gram matrix must pass psd_check at 1e-8; a diagonal jitter keeps
    Cholesky alive for kernels sitting on the PSD boundary. Returns an
    (n_samples x patch size) array, byte-identical for a fixed seed.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    gram = gram_matrix(kernel, patch)
    min_eig, ok = psd_check(gram, tol=1e-8)
    if not ok:
        raise ValueError(
            f"kernel is not positive semi-definite on this patch "
            f"(min eigenvalue {min_eig:.3e})"
        )
    chol = np.linalg.cholesky(gram + jitter * np.eye(len(gram)))
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_samples, len(gram)))
    return z @ chol.T


@dataclass
class CltReport:
    """Covariance and normality diagnostics for n^{-1/2} sums of rule outputs."""

    rule_name: str
    d: int
    k: int
    n_copies: int
    samples: int
    corr: EstimateWithError
    reference_corr: float
    corr_gap: float
    corr_tolerance: float
    covariance_ok: bool
    excess_kurtosis: float
    kurtosis_se: float


def _normalization_pilot(
    rule: LocalRule, patch: TreePatch, seed, pilot: int = 20000
) -> None:
    """Reject rules whose single-copy output is not mean-0, variance-1."""
    shape = ball_shape(patch.d, rule.r)
    order = ball_indices(patch, patch.v, rule.r)
    rng = np.random.default_rng(seed)
    labels = _draw_labels(rng, rule.label_model, (pilot, patch.n))
    ys = rule.outputs(labels[:, order], shape)
    mean = float(ys.mean())
    var = float(ys.var(ddof=1))
    se_mean = float(ys.std(ddof=1) / math.sqrt(pilot))
    se_var = float(((ys - mean) ** 2).std(ddof=1) / math.sqrt(pilot))
    if abs(mean) > 4 * se_mean + 1e-12 or abs(var - 1.0) > 4 * se_var + 1e-12:
        raise ValueError(
            f"rule {rule.name!r} is not normalized: pilot mean {mean:.4f}, "
            f"variance {var:.4f}; wrap it with standardize_rule first"
        )


def clt_convergence(
    rule: LocalRule,
    d: int,
    k: int,
    n_copies: int,
    samples: int,
    seed: int = 0,
    reference_corr: float | None = None,
    chunks: int = 100,
) -> CltReport:
    """Simulate n^{-1/2} sums of independent rule outputs at two distance-k vertices.

    Checks that (a) the endpoint correlation matches the single-copy
    correlation structure (exact for ball sums, matched Monte Carlo
    otherwise) within 4 combined standard errors, and (b) the marginal
    excess kurtosis at an endpoint, which shrinks like 1/n_copies.

    The rule must already be normalized to mean 0, variance 1 per copy; a
    pilot run rejects rules that are not.
    """
    if n_copies < 1:
        raise ValueError("n_copies must be positive")
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")

    patch = build_tree_patch(d, k, rule.r)
    pilot_seq, main_seq, ref_seq = np.random.SeedSequence(seed).spawn(3)
    _normalization_pilot(rule, patch, pilot_seq)

    shape = ball_shape(d, rule.r)
    order_v = ball_indices(patch, patch.v, rule.r)
    order_w = ball_indices(patch, patch.w, rule.r)

    sizes = _chunk_sizes(samples, min(chunks, samples))
    children = main_seq.spawn(len(sizes))
    xs_parts: list[np.ndarray] = []
    ys_parts: list[np.ndarray] = []
    scale = 1.0 / math.sqrt(n_copies)
    for i, size in enumerate(sizes):
        rng = np.random.default_rng(children[i])
        labels = _draw_labels(rng, rule.label_model, (size * n_copies, patch.n))
        yv = rule.outputs(labels[:, order_v], shape).reshape(size, n_copies)
        yw = rule.outputs(labels[:, order_w], shape).reshape(size, n_copies)
        xs_parts.append(yv.sum(axis=1) * scale)
        ys_parts.append(yw.sum(axis=1) * scale)
    xs = np.concatenate(xs_parts)
    ys = np.concatenate(ys_parts)

    corr = _pearson(xs, ys, samples, seed)
    if reference_corr is None:
        if rule.name.startswith("ballsum"):
            reference_corr = float(ballsum_corr_exact(d, rule.r, k))
            ref_se = 0.0
        else:
            ref = mc_correlation(
                rule, d, k, samples, seed=int(ref_seq.generate_state(1)[0])
            )
            reference_corr = ref.estimate
            ref_se = ref.se
    else:
        ref_se = 0.0

    gap = abs(corr.estimate - reference_corr)
    tolerance = 4.0 * math.hypot(corr.se, ref_se)

    centered = xs - xs.mean()
    m2 = float((centered**2).mean())
    m4 = float((centered**4).mean())
    excess_kurtosis = m4 / (m2 * m2) - 3.0
    kurtosis_se = math.sqrt(24.0 / samples)

    return CltReport(
        rule_name=rule.name,
        d=d,
        k=k,
        n_copies=n_copies,
        samples=samples,
        corr=corr,
        reference_corr=reference_corr,
        corr_gap=gap,
        corr_tolerance=tolerance,
        covariance_ok=gap <= tolerance,
        excess_kurtosis=excess_kurtosis,
        kurtosis_se=kurtosis_se,
    )
