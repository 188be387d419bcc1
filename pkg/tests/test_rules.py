import math

import numpy as np
import pytest

from corrtree.graphs import build_tree_patch
from corrtree.rules import (
    BallStructureError,
    LabeledBall,
    apply_rule,
    ball_indices,
    ball_shape,
    check_automorphism_invariance,
    iid_labeling,
    rule_ballsum,
    rule_first_child,
    rule_minlabel,
    standardize_rule,
)

from helpers import complete_graph, petersen_graph


# ------------------------------------------------------------------- labelings

def test_labeling_deterministic_per_seed():
    patch = build_tree_patch(3, 2, 2)
    a = iid_labeling(patch, "uniform01", seed=42)
    b = iid_labeling(patch, "uniform01", seed=42)
    c = iid_labeling(patch, "uniform01", seed=43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_uniform_labels_in_range():
    patch = build_tree_patch(3, 1, 2)
    labels = iid_labeling(patch, "uniform01", seed=0)
    assert np.all((labels >= 0.0) & (labels < 1.0))


def test_sign_labels_mean_within_binomial_se():
    from helpers import cycle_graph

    host = cycle_graph(100000)
    labels = iid_labeling(host, "sign", seed=1)
    assert set(np.unique(labels)) == {-1.0, 1.0}
    assert abs(labels.mean()) <= 4 / math.sqrt(100000)


# ------------------------------------------------------------------ ball shape

def test_ball_shape_sizes_and_structure():
    shape = ball_shape(3, 2)
    assert shape.size == 10
    assert shape.parent[0] == -1
    assert len(shape.children[0]) == 3          # root has d children
    assert all(len(shape.children[c]) == 2 for c in shape.children[0])


def test_ball_indices_on_patch_ordered_by_depth():
    patch = build_tree_patch(3, 2, 1)
    order = ball_indices(patch, patch.v, 1)
    assert order[0] == patch.v
    assert len(order) == 4
    dv = np.asarray(patch.dist_v)
    assert list(dv[order]) == [0, 1, 1, 1]


def test_ball_indices_rejects_truncated_ball():
    patch = build_tree_patch(3, 2, 1)
    leaf = next(
        u for u in range(patch.n) if len(patch.adjacency[u]) == 1 and u != patch.v
    )
    with pytest.raises(BallStructureError, match="truncated"):
        ball_indices(patch, leaf, 1)


def test_ball_indices_rejects_cycles():
    with pytest.raises(BallStructureError, match="not a tree"):
        ball_indices(complete_graph(4), 0, 1)


# ------------------------------------------------------------------ apply_rule

def test_minlabel_on_k4_errors():
    g = complete_graph(4)
    labels = iid_labeling(g, "uniform01", seed=0)
    with pytest.raises(BallStructureError):
        apply_rule(rule_minlabel(), g, labels, at=[0])


def test_ballsum_r0_is_identity():
    patch = build_tree_patch(3, 3, 0)
    labels = iid_labeling(patch, "sign", seed=5)
    out = apply_rule(rule_ballsum(0), patch, labels, at=[patch.v, patch.w])
    assert out[0] == labels[patch.v]
    assert out[1] == labels[patch.w]


def test_ballsum_all_plus_one():
    patch = build_tree_patch(3, 2, 1)
    labels = np.ones(patch.n)
    out = apply_rule(rule_ballsum(1), patch, labels, at=[patch.v, patch.w])
    assert out == pytest.approx([2.0, 2.0])     # 4 / sqrt(4)


def test_ballsum_all_minus_one():
    patch = build_tree_patch(3, 0, 1)
    out = apply_rule(rule_ballsum(1), patch, -np.ones(patch.n), at=[patch.v])
    assert out[0] == pytest.approx(-2.0)


def test_minlabel_examples():
    shape = ball_shape(3, 1)
    ball = LabeledBall(shape, np.array([0.1, 0.5, 0.7, 0.9]))
    assert rule_minlabel().evaluate(ball) == 1.0
    ball = LabeledBall(shape, np.array([0.9, 0.5, 0.7, 0.1]))
    assert rule_minlabel().evaluate(ball) == 0.0


def test_minlabel_tie_resolves_to_zero():
    shape = ball_shape(3, 1)
    ball = LabeledBall(shape, np.array([0.5, 0.5, 0.7, 0.9]))
    assert rule_minlabel().evaluate(ball) == 0.0


def test_minlabel_inclusion_frequency():
    # root is the minimum of d+1 iid uniforms with probability 1/(d+1)
    patch = build_tree_patch(3, 0, 1)
    rule = rule_minlabel()
    rng = np.random.default_rng(7)
    n = 20000
    labels = rng.random((n, patch.n))
    order = ball_indices(patch, patch.v, 1)
    hits = rule.outputs(labels[:, order], ball_shape(3, 1))
    p = hits.mean()
    se = math.sqrt(0.25 * 0.75 / n)
    assert abs(p - 0.25) <= 4 * se


def test_minlabel_support_is_independent_set():
    g = petersen_graph()  # girth 5, so radius-1 balls are trees
    rule = rule_minlabel()
    for seed in range(20):
        labels = iid_labeling(g, "uniform01", seed=seed)
        out = apply_rule(rule, g, labels, at=range(g.n))
        chosen = {u for u in range(g.n) if out[u] == 1.0}
        for u in chosen:
            assert not chosen.intersection(g.adjacency[u])


# -------------------------------------------------------------------- locality

def test_locality_perturbation():
    patch = build_tree_patch(3, 2, 1)
    rule = rule_ballsum(1)
    labels = iid_labeling(patch, "sign", seed=3)
    base = apply_rule(rule, patch, labels, at=[patch.v])[0]
    far = [u for u in range(patch.n) if patch.dist_v[u] > 1]
    assert far
    for u in far:
        flipped = labels.copy()
        flipped[u] = -flipped[u]
        assert apply_rule(rule, patch, flipped, at=[patch.v])[0] == base


def test_long_range_outputs_use_disjoint_labels():
    # k > 2r: the two endpoint balls share no vertices
    patch = build_tree_patch(3, 4, 1)
    assert len(set(ball_indices(patch, patch.v, 1)) &
               set(ball_indices(patch, patch.w, 1))) == 0


def test_long_range_empirical_correlation_near_zero():
    patch = build_tree_patch(3, 4, 1)
    rule = rule_ballsum(1)
    shape = ball_shape(3, 1)
    rng = np.random.default_rng(11)
    n = 20000
    labels = 2.0 * rng.integers(0, 2, (n, patch.n)) - 1.0
    yv = rule.outputs(labels[:, ball_indices(patch, patch.v, 1)], shape)
    yw = rule.outputs(labels[:, ball_indices(patch, patch.w, 1)], shape)
    corr = np.corrcoef(yv, yw)[0, 1]
    assert abs(corr) <= 4 / math.sqrt(n)


# ------------------------------------------------------------------ invariance

def test_builtin_rules_pass_invariance():
    assert check_automorphism_invariance(rule_ballsum(2), d=3, trials=100, seed=0)
    assert check_automorphism_invariance(rule_minlabel(), d=3, trials=100, seed=0)
    assert check_automorphism_invariance(rule_ballsum(1), d=4, trials=100, seed=0)


def test_adversarial_rule_fails_invariance():
    report = check_automorphism_invariance(rule_first_child(), d=3, trials=100, seed=0)
    assert not report.passed
    assert report.violation is not None
    labels, permuted, y0, y1 = report.violation
    assert y0 != y1


def test_standardize_rule_shifts_and_scales():
    rule = rule_minlabel()
    std = standardize_rule(rule, mean=0.25, sd=math.sqrt(0.25 * 0.75))
    shape = ball_shape(3, 1)
    ball = LabeledBall(shape, np.array([0.1, 0.5, 0.7, 0.9]))
    expected = (1.0 - 0.25) / math.sqrt(0.1875)
    assert std.evaluate(ball) == pytest.approx(expected)
    assert std.outputs(np.array([[0.1, 0.5, 0.7, 0.9]]), shape)[0] == pytest.approx(expected)
