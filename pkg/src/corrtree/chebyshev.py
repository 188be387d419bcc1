"""Chebyshev polynomials, the distance-k correlation bound, and spectral measures.

The operator that connects vertices at distance exactly k in a d-regular
host, normalized by the sphere size d*(d-1)^(k-1), acts on the mean-zero
subspace as q_k(A / (2*sqrt(d-1))) / sqrt(d*(d-1)^(k-1)), where

    q_k(x) = sqrt((d-1)/d) * U_k(x) - U_{k-2}(x) / sqrt(d*(d-1))

with U_k the Chebyshev polynomials of the second kind (U_{-1} = 0). Both
|U_k| and |T_k| peak at x = 1, so the distance-k correlation of any rule's
output is bounded by

    corr_bound(d, k) = q_k(1) / sqrt(d*(d-1)^(k-1)) = (k+1-2k/d) * (d-1)^(-k/2).

This module also carries the Kesten-McKay spectral density of the d-regular
tree and the map from a probability measure on [-1, 1] to its correlation
sequence x_k = integral of q_k / sqrt(d*(d-1)^(k-1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "MeasureOnInterval",
    "CorrelationSequence",
    "cheb_U",
    "cheb_T",
    "q_poly",
    "u_value",
    "t_value",
    "q_value",
    "corr_bound",
    "km_support",
    "km_density",
    "km_measure",
    "km_measure_rescaled",
    "km_moment",
    "corr_sequence_from_measure",
]


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in the monomial basis, ascending coefficients.

    Coefficients may be exact ints (Chebyshev instances) or floats; trailing
    zeros are trimmed. Horner evaluation; vectorizes over numpy arrays.
    Monomial coefficients are only trustworthy up to degree ~60 in float
    arithmetic, which is why the value-recurrence evaluators below exist.
    """

    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = np.zeros_like(np.asarray(x, dtype=float))
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        if np.ndim(x) == 0:
            return float(acc)
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(tuple(out))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "Polynomial":
        return Polynomial(tuple(c * a for a in self.coeffs))

    def shift_up(self) -> "Polynomial":
        """Multiply by x."""
        if not self.coeffs:
            return self
        return Polynomial((0,) + self.coeffs)


@lru_cache(maxsize=None)
def cheb_U(k: int) -> Polynomial:
    """Chebyshev polynomial of the second kind, with U_{-1} = 0.

    Built by the exact integer recurrence U_{k+1} = 2x U_k - U_{k-1}.
    """
    if k < -1:
        raise ValueError(f"cheb_U requires k >= -1, got {k}")
    if k == -1:
        return Polynomial(())
    if k == 0:
        return Polynomial((1,))
    return cheb_U(k - 1).shift_up().scale(2) - cheb_U(k - 2)


@lru_cache(maxsize=None)
def cheb_T(k: int) -> Polynomial:
    """Chebyshev polynomial of the first kind, T_k(cos t) = cos(k t)."""
    if k < 0:
        raise ValueError(f"cheb_T requires k >= 0, got {k}")
    if k == 0:
        return Polynomial((1,))
    if k == 1:
        return Polynomial((0, 1))
    return cheb_T(k - 1).shift_up().scale(2) - cheb_T(k - 2)


def q_poly(d: int, k: int) -> Polynomial:
    """The degree-k polynomial driving the distance-k correlation bound.

    Defined for k >= 1; the distance-0 correlation is the constant 1 and is
    special-cased upstream rather than extending q to k = 0. Satisfies
    sqrt(d(d-1)) * q_k(x) = (d-2) U_k(x) + 2 T_k(x).
    """
    if d < 3:
        raise ValueError(f"q_poly requires d >= 3, got d={d}")
    if k < 1:
        raise ValueError(f"q_poly requires k >= 1, got k={k}")
    a = math.sqrt((d - 1) / d)
    b = 1.0 / math.sqrt(d * (d - 1))
    return cheb_U(k).scale(a) - cheb_U(k - 2).scale(b)


def u_value(k: int, x):
    """U_k evaluated by the three-term value recurrence (stable on [-1, 1])."""
    if k < -1:
        raise ValueError(f"u_value requires k >= -1, got {k}")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)       # U_{-1}
    cur = np.ones_like(x)         # U_0
    if k == -1:
        return prev if prev.ndim else float(prev)
    for _ in range(k):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur if cur.ndim else float(cur)


def t_value(k: int, x):
    """T_k evaluated by the three-term value recurrence."""
    if k < 0:
        raise ValueError(f"t_value requires k >= 0, got {k}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)        # T_0
    cur = np.asarray(x, dtype=float).copy()  # T_1
    if k == 0:
        return prev if prev.ndim else float(prev)
    for _ in range(k - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur if cur.ndim else float(cur)


def q_value(d: int, k: int, x):
    """q_k evaluated pointwise; use this instead of q_poly(...)(x) for large k."""
    if d < 3:
        raise ValueError(f"q_value requires d >= 3, got d={d}")
    if k < 1:
        raise ValueError(f"q_value requires k >= 1, got k={k}")
    a = math.sqrt((d - 1) / d)
    b = 1.0 / math.sqrt(d * (d - 1))
    return a * u_value(k, x) - b * u_value(k - 2, x)


def corr_bound(d: int, k: int) -> float:
    """Maximal |correlation| at distance k: (k+1-2k/d) * (d-1)^(-k/2).

    Equals max over [-1,1] of |q_k| / sqrt(d*(d-1)^(k-1)) for k >= 1, the
    maximum being attained at x = 1; returns 1 for k = 0.
    """
    if d < 3:
        raise ValueError(f"corr_bound requires d >= 3, got d={d}")
    if k < 0:
        raise ValueError(f"corr_bound requires k >= 0, got k={k}")
    return (k + 1 - 2 * k / d) * (d - 1) ** (-k / 2)


@dataclass
class MeasureOnInterval:
    """A measure on a real interval, as weighted point masses.

    Gridded densities are represented by their quadrature nodes and weights,
    so one representation covers both cases the rest of the code needs.
    """

    a: float
    b: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(self.weights < 0):
            raise ValueError("measure weights must be nonnegative")

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def is_probability(self, tol: float = 1e-9) -> bool:
        return abs(self.total_mass - 1.0) <= tol

    def expect(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, fn(self.nodes)))

    def moment(self, k: int) -> float:
        return float(np.dot(self.weights, self.nodes**k))

    def scaled(self, c: float) -> "MeasureOnInterval":
        """Pushforward under t -> c*t (weights unchanged)."""
        lo, hi = sorted((c * self.a, c * self.b))
        return MeasureOnInterval(lo, hi, c * self.nodes, self.weights.copy())

    @classmethod
    def point_masses(
        cls, points: Sequence[float], weights: Sequence[float] | None = None
    ) -> "MeasureOnInterval":
        pts = np.asarray(points, dtype=float)
        if weights is None:
            w = np.full(pts.shape, 1.0 / len(pts))
        else:
            w = np.asarray(weights, dtype=float)
        return cls(float(pts.min()), float(pts.max()), pts, w)

    @classmethod
    def from_density(
        cls, fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int = 20000
    ) -> "MeasureOnInterval":
        """Composite midpoint discretization of a density on [a, b]."""
        h = (b - a) / n
        nodes = a + (np.arange(n) + 0.5) * h
        return cls(a, b, nodes, fn(nodes) * h)


def km_support(d: int) -> tuple[float, float]:
    """Support of the d-regular tree's spectral density: [-2 sqrt(d-1), 2 sqrt(d-1)]."""
    b = 2.0 * math.sqrt(d - 1)
    return (-b, b)


def km_density(d: int, t):
    """Kesten-McKay density d/(2 pi) * sqrt(4(d-1) - t^2) / (d^2 - t^2).

    Zero outside the support. Accepts scalars or arrays.
    """
    if d < 3:
        raise ValueError(f"km_density requires d >= 3, got d={d}")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    inside = np.abs(t) < 2.0 * math.sqrt(d - 1)
    ti = t[inside]
    out[inside] = d / (2 * np.pi) * np.sqrt(4 * (d - 1) - ti**2) / (d * d - ti**2)
    return float(out[0]) if scalar else out


def km_measure(d: int, grid_size: int = 20000) -> MeasureOnInterval:
    """Quadrature form of the Kesten-McKay measure.

    Composite midpoint rule after the substitution t = 2 sqrt(d-1) sin(theta),
    which absorbs the square-root edge behavior: the theta-integrand
    (2 d (d-1) / pi) cos^2(theta) / (d^2 - 4(d-1) sin^2(theta)) is smooth and
    pi-periodic, so the rule converges far below the 1e-8 mass tolerance.
    """
    if d < 3:
        raise ValueError(f"km_measure requires d >= 3, got d={d}")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    b = 2.0 * math.sqrt(d - 1)
    h = np.pi / grid_size
    theta = -np.pi / 2 + (np.arange(grid_size) + 0.5) * h
    nodes = b * np.sin(theta)
    weights = (2 * d * (d - 1) / np.pi) * np.cos(theta) ** 2 / (d * d - nodes**2) * h
    return MeasureOnInterval(-b, b, nodes, weights)


def km_measure_rescaled(d: int, grid_size: int = 20000) -> MeasureOnInterval:
    """Kesten-McKay pushed to [-1, 1] by t -> t / (2 sqrt(d-1))."""
    return km_measure(d, grid_size).scaled(1.0 / (2.0 * math.sqrt(d - 1)))


def km_moment(d: int, k: int, grid_size: int = 20000) -> float:
    """k-th moment of the Kesten-McKay measure.

    Equals the number of closed length-k walks at the root of the d-regular
    tree; odd moments vanish by symmetry.
    """
    if k < 0:
        raise ValueError(f"moment order must be nonnegative, got {k}")
    return km_measure(d, grid_size).moment(k)


@dataclass
class CorrelationSequence:
    """Correlations x_0 = 1, x_1, ..., x_K at distances 0..K for degree d."""

    d: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if abs(self.values[0] - 1.0) > 1e-12:
            raise ValueError("a correlation sequence starts at x_0 = 1")

    @property
    def K(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def __len__(self) -> int:
        return len(self.values)


def corr_sequence_from_measure(
    d: int, eta: MeasureOnInterval, K: int
) -> CorrelationSequence:
    """Correlation sequence of the process with spectral measure eta on [-1, 1].

    x_k = integral of q_k / sqrt(d*(d-1)^(k-1)) d-eta for k >= 1, with
    x_0 = 1. Every output satisfies |x_k| <= corr_bound(d, k).
    """
    if K < 0:
        raise ValueError(f"K must be nonnegative, got {K}")
    if np.any(np.abs(eta.nodes) > 1.0 + 1e-12):
        raise ValueError("eta must be supported on [-1, 1]")
    if not eta.is_probability(tol=1e-9):
        raise ValueError(f"eta must be a probability measure, mass={eta.total_mass}")
    values = np.empty(K + 1)
    values[0] = 1.0
    x = np.clip(eta.nodes, -1.0, 1.0)
    for k in range(1, K + 1):
        norm = math.sqrt(d) * (d - 1) ** ((k - 1) / 2)
        values[k] = float(np.dot(eta.weights, q_value(d, k, x))) / norm
    return CorrelationSequence(d=d, values=values)
