"""Randomized local rules: i.i.d. labelings, radius-r balls, and rule evaluation.

A rule sees the labeled radius-r ball around a vertex and emits a real
number. Balls are handed to rules in a fixed canonical BFS order (root at
index 0) rather than as isomorphism classes; rules are required to be
invariant under root-preserving relabelings, which
:func:`check_automorphism_invariance` probes with random automorphisms.

Two label models are supported: uniform [0, 1) draws and fair +-1 signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "BallShape",
    "LabeledBall",
    "LocalRule",
    "BallStructureError",
    "ball_shape",
    "iid_labeling",
    "ball_indices",
    "apply_rule",
    "rule_minlabel",
    "rule_ballsum",
    "rule_first_child",
    "standardize_rule",
    "check_automorphism_invariance",
    "InvarianceReport",
]

LABEL_MODELS = ("uniform01", "sign")


class BallStructureError(ValueError):
    """A requested vertex does not carry a full tree ball of the rule's radius."""


@dataclass(frozen=True)
class BallShape:
    """The radius-r ball of T_d as a rooted tree in canonical BFS order.

    Vertex 0 is the root; the root has d children and every other internal
    vertex d-1, laid out level by level.
    """

    d: int
    r: int
    parent: tuple[int, ...]
    depth: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.parent)


@lru_cache(maxsize=None)
def ball_shape(d: int, r: int) -> BallShape:
    if d < 2:
        raise ValueError(f"ball shapes require d >= 2, got d={d}")
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got r={r}")
    parent = [-1]
    depth = [0]
    children: list[list[int]] = [[]]
    frontier = [0]
    for level in range(r):
        nxt = []
        for u in frontier:
            fanout = d if u == 0 else d - 1
            for _ in range(fanout):
                c = len(parent)
                parent.append(u)
                depth.append(level + 1)
                children.append([])
                children[u].append(c)
                nxt.append(c)
        frontier = nxt
    return BallShape(
        d=d,
        r=r,
        parent=tuple(parent),
        depth=tuple(depth),
        children=tuple(tuple(c) for c in children),
    )


@dataclass(frozen=True)
class LabeledBall:
    """A canonical ball shape together with one label per vertex."""

    shape: BallShape
    labels: np.ndarray

    def __post_init__(self):
        if len(self.labels) != self.shape.size:
            raise ValueError("label count does not match ball size")

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def r(self) -> int:
        return self.shape.r

    @property
    def root_label(self) -> float:
        return float(self.labels[0])


@dataclass(frozen=True)
class LocalRule:
    """A radius-r map from a labeled ball to a real output.

    ``evaluate`` handles one ball; ``evaluate_batch``, when present, maps a
    (samples x ball_size) label matrix in canonical ball order to a vector of
    outputs and is what the Monte Carlo drivers use.
    """

    name: str
    r: int
    label_model: str
    evaluate: Callable[[LabeledBall], float]
    evaluate_batch: Callable[[np.ndarray, BallShape], np.ndarray] | None = None

    def __post_init__(self):
        if self.label_model not in LABEL_MODELS:
            raise ValueError(f"unknown label model {self.label_model!r}")
        if self.r < 0:
            raise ValueError("rule radius must be nonnegative")

    def outputs(self, labels: np.ndarray, shape: BallShape) -> np.ndarray:
        """Batch outputs for a (samples x ball_size) label matrix."""
        if self.evaluate_batch is not None:
            return np.asarray(self.evaluate_batch(labels, shape), dtype=float)
        return np.array(
            [self.evaluate(LabeledBall(shape, row)) for row in labels], dtype=float
        )


def iid_labeling(host, label_model: str, seed) -> np.ndarray:
    """One independent label per vertex of a patch or graph, in vertex order.

    Deterministic per (seed, vertex order). `sign` draws +-1 with equal
    probability; `uniform01` draws from [0, 1).
    """
    rng = np.random.default_rng(seed)
    return _draw_labels(rng, label_model, host.n)


def _draw_labels(rng: np.random.Generator, label_model: str, size) -> np.ndarray:
    if label_model == "uniform01":
        return rng.random(size)
    if label_model == "sign":
        return 2.0 * rng.integers(0, 2, size=size).astype(float) - 1.0
    raise ValueError(f"unknown label model {label_model!r}")


def ball_indices(host, vertex: int, r: int) -> np.ndarray:
    """Host vertices of the radius-r ball around `vertex`, in canonical BFS order.

    Raises BallStructureError unless the ball is a complete tree: every
    vertex at depth < r must have full degree d in the host and no edge may
    close a cycle within the ball.
    """
    adj = host.adjacency
    d = host.d
    if not 0 <= vertex < len(adj):
        raise ValueError(f"vertex {vertex} out of range")
    order = [vertex]
    depth = {vertex: 0}
    parent = {vertex: -1}
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        if depth[u] < r and len(adj[u]) != d:
            raise BallStructureError(
                f"ball of radius {r} at vertex {vertex} is truncated: "
                f"vertex {u} at depth {depth[u]} has degree {len(adj[u])} < {d}"
            )
        for nb in adj[u]:
            if nb == parent[u]:
                continue
            if nb in depth:
                raise BallStructureError(
                    f"ball of radius {r} at vertex {vertex} is not a tree "
                    f"(cycle through vertices {u} and {nb})"
                )
            if depth[u] < r:
                depth[nb] = depth[u] + 1
                parent[nb] = u
                order.append(nb)
    return np.array(order, dtype=np.int64)


def apply_rule(rule: LocalRule, host, labels, at) -> np.ndarray:
    """Evaluate a rule at the requested host vertices under a fixed labeling.

    The output at a vertex depends only on labels within distance rule.r of
    it. Vertices whose radius-r ball is truncated or contains a cycle are
    rejected with BallStructureError.
    """
    labels = np.asarray(labels, dtype=float)
    if len(labels) != host.n:
        raise ValueError("labels must cover every host vertex")
    shape = ball_shape(host.d, rule.r)
    at = list(at)
    out = np.empty(len(at), dtype=float)
    for i, vertex in enumerate(at):
        idx = ball_indices(host, int(vertex), rule.r)
        out[i] = rule.outputs(labels[idx][np.newaxis, :], shape)[0]
    return out


def rule_minlabel() -> LocalRule:
    """Radius-1 rule: output 1 iff the root's label is strictly the smallest in its ball.

    Under uniform labels the support of the output is an independent set with
    probability one; ties (a null event) resolve to 0 at both vertices.
    """

    def evaluate(ball: LabeledBall) -> float:
        return 1.0 if ball.labels[0] < ball.labels[1:].min() else 0.0

    def evaluate_batch(labels: np.ndarray, shape: BallShape) -> np.ndarray:
        return (labels[:, 0] < labels[:, 1:].min(axis=1)).astype(float)

    return LocalRule(
        name="minlabel",
        r=1,
        label_model="uniform01",
        evaluate=evaluate,
        evaluate_batch=evaluate_batch,
    )


def rule_ballsum(r: int) -> LocalRule:
    """Radius-r rule: sum of the +-1 labels over the ball, divided by sqrt(ball size).

    Mean 0 and variance 1 under i.i.d. signs; at r = 0 it is the identity on
    the root label.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")

    def evaluate(ball: LabeledBall) -> float:
        return float(ball.labels.sum() / math.sqrt(ball.shape.size))

    def evaluate_batch(labels: np.ndarray, shape: BallShape) -> np.ndarray:
        return labels.sum(axis=1) / math.sqrt(shape.size)

    return LocalRule(
        name=f"ballsum(r={r})",
        r=r,
        label_model="sign",
        evaluate=evaluate,
        evaluate_batch=evaluate_batch,
    )


def rule_first_child(r: int = 1) -> LocalRule:
    """Deliberately broken rule returning the label of one fixed child of the root.

    Not automorphism invariant; exists to exercise the invariance checker.
    """
    if r < 1:
        raise ValueError("needs r >= 1 so the root has a child")

    def evaluate(ball: LabeledBall) -> float:
        return float(ball.labels[1])

    return LocalRule(
        name="first_child", r=r, label_model="uniform01", evaluate=evaluate
    )


def standardize_rule(rule: LocalRule, mean: float, sd: float) -> LocalRule:
    """Affinely rescale a rule's output to mean 0, variance 1."""
    if sd <= 0:
        raise ValueError("sd must be positive")

    def evaluate(ball: LabeledBall) -> float:
        return (rule.evaluate(ball) - mean) / sd

    batch = None
    if rule.evaluate_batch is not None:
        inner = rule.evaluate_batch

        def batch(labels: np.ndarray, shape: BallShape) -> np.ndarray:
            return (inner(labels, shape) - mean) / sd

    return LocalRule(
        name=f"standardized({rule.name})",
        r=rule.r,
        label_model=rule.label_model,
        evaluate=evaluate,
        evaluate_batch=batch,
    )


def random_ball_automorphism(
    shape: BallShape, rng: np.random.Generator
) -> np.ndarray:
    """A uniform-ish root-preserving automorphism of the ball, as an index map.

    Children blocks are permuted independently at every vertex; subtrees
    hanging at equal depth are isomorphic, so any such recursive permutation
    is an automorphism.
    """
    mapping = np.empty(shape.size, dtype=np.int64)
    mapping[0] = 0
    stack = [(0, 0)]
    while stack:
        a, b = stack.pop()
        ca = shape.children[a]
        cb = shape.children[b]
        perm = rng.permutation(len(ca))
        for i, child in enumerate(ca):
            target = cb[perm[i]]
            mapping[child] = target
            stack.append((child, target))
    return mapping


@dataclass
class InvarianceReport:
    passed: bool
    trials: int
    violation: tuple[np.ndarray, np.ndarray, float, float] | None = None

    def __bool__(self) -> bool:
        return self.passed


def check_automorphism_invariance(
    rule: LocalRule, d: int = 3, trials: int = 100, seed: int = 0
) -> InvarianceReport:
    """Probe rule invariance with random labelings and random ball automorphisms.

    Outputs must agree exactly between a labeling and its automorphic
    relabeling; the first violating pair is returned in the report.
    """
    shape = ball_shape(d, rule.r)
    rng = np.random.default_rng(seed)
    for t in range(trials):
        labels = _draw_labels(rng, rule.label_model, shape.size)
        mapping = random_ball_automorphism(shape, rng)
        permuted = np.empty_like(labels)
        permuted[mapping] = labels
        y0 = rule.evaluate(LabeledBall(shape, labels))
        y1 = rule.evaluate(LabeledBall(shape, permuted))
        if y0 != y1:
            return InvarianceReport(
                passed=False, trials=t + 1, violation=(labels, permuted, y0, y1)
            )
    return InvarianceReport(passed=True, trials=trials)
