"""Correlation decay of randomized local algorithms on regular trees.

Implements the quantitative machinery around the distance-k correlation
bound (k+1-2k/d)(d-1)^(-k/2) for outputs of radius-r local rules on
d-regular trees and large-girth d-regular graphs: exact ball-sum
correlations, Chebyshev polynomials and the Kesten-McKay measure,
tree random walks, finite-graph spectral gaps, correlation sequences from
spectral measures, and the matching Gaussian processes.
"""

from .chebyshev import (
    CorrelationSequence,
    MeasureOnInterval,
    Polynomial,
    cheb_T,
    cheb_U,
    corr_bound,
    corr_sequence_from_measure,
    km_density,
    km_measure,
    km_measure_rescaled,
    km_moment,
    km_support,
    q_poly,
    q_value,
)
from .correlation import (
    BoundCheckReport,
    DegenerateOutputError,
    EstimateWithError,
    GraphTreeReport,
    ballsum_corr_exact,
    ballsum_limits,
    bound_check,
    graph_vs_tree_check,
    mc_correlation,
)
from .gaussian import (
    CltReport,
    DistanceKernel,
    clt_convergence,
    gram_matrix,
    psd_check,
    sample_gaussian,
)
from .graph_spectrum import (
    PowerIterationError,
    SpectralReport,
    is_ramanujan,
    rho_estimate,
    rho_via_subsets,
)
from .graphs import (
    FiniteRegularGraph,
    GraphGenerationError,
    TreePatch,
    ball_size,
    build_tree_patch,
    girth,
    random_regular_graph,
    sphere_size,
)
from .rules import (
    BallStructureError,
    LabeledBall,
    LocalRule,
    apply_rule,
    check_automorphism_invariance,
    iid_labeling,
    rule_ballsum,
    rule_first_child,
    rule_minlabel,
    standardize_rule,
)
from .walks import (
    AsymptoteTable,
    DistanceChainState,
    asymptote_check,
    distance_chain,
    finite_walk_prob,
    hit_ball_prob,
    return_prob,
)

__version__ = "0.1.0"
