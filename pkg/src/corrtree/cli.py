"""Command-line interface: one subcommand per subsystem, seeded and machine-readable.

Every run is a pure function of its argv (all randomness is seeded), floats
print with 6 significant digits, exact rationals print as "p/q", JSON
reports carry a "schema" field naming the report type, and CSV output starts
with a header row. Exit codes: 0 success, 1 precondition or input errors
(diagnostic on stderr), 2 failed quantitative checks (e.g. a violated
correlation bound).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from .chebyshev import (
    MeasureOnInterval,
    corr_bound,
    corr_sequence_from_measure,
    km_density,
    km_measure_rescaled,
    km_moment,
    km_support,
)
from .correlation import (
    DegenerateOutputError,
    ballsum_corr_exact,
    ballsum_limits,
    bound_check,
    mc_correlation,
)
from .gaussian import DistanceKernel, gram_matrix, psd_check, sample_gaussian
from .graph_spectrum import PowerIterationError, is_ramanujan, rho_via_subsets
from .graphs import (
    FiniteRegularGraph,
    GraphGenerationError,
    build_tree_patch,
    girth,
    random_regular_graph,
)
from .rules import BallStructureError, rule_ballsum, rule_minlabel
from .walks import asymptote_check, hit_ball_prob

USAGE_ERROR_EXIT = 1
CHECK_FAILED_EXIT = 2


def _fmt(x) -> str:
    """6 significant digits for floats, p/q for rationals, str otherwise."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _round6(obj):
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {k: _round6(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round6(v) for v in obj]
    return obj


def _write(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, output: str | None) -> None:
    _write(json.dumps(_round6(obj), indent=2) + "\n", output)


def _emit_csv(header: list[str], rows: list[list], output: str | None) -> None:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    _write(buf.getvalue(), output)


def _read_graph(path: str) -> FiniteRegularGraph:
    if path == "-":
        return FiniteRegularGraph.from_edge_list(sys.stdin.read())
    with open(path) as fh:
        return FiniteRegularGraph.from_edge_list(fh.read())


def _make_rule(name: str, r: int):
    if name == "minlabel":
        if r not in (None, 1):
            raise ValueError("minlabel has fixed radius 1")
        return rule_minlabel()
    if name == "ballsum":
        return rule_ballsum(1 if r is None else r)
    raise ValueError(f"unknown rule {name!r}; choose ballsum or minlabel")


def _parse_measure(spec: str, d: int, grid_size: int) -> MeasureOnInterval:
    """Measure mini-language: km | uniform | point:X | points:X:W,X:W,..."""
    if spec == "km":
        return km_measure_rescaled(d, grid_size)
    if spec == "uniform":
        return MeasureOnInterval.from_density(
            lambda t: np.full_like(t, 0.5), -1.0, 1.0, grid_size
        )
    if spec.startswith("point:"):
        return MeasureOnInterval.point_masses([float(spec[len("point:"):])])
    if spec.startswith("points:"):
        pts, wts = [], []
        for item in spec[len("points:"):].split(","):
            x, w = item.split(":")
            pts.append(float(x))
            wts.append(float(w))
        total = sum(wts)
        return MeasureOnInterval.point_masses(pts, [w / total for w in wts])
    raise ValueError(f"cannot parse measure spec {spec!r}")


def cmd_bound(args) -> int:
    if args.rule is None:
        _write(_fmt(corr_bound(args.d, args.k)) + "\n", args.output)
        return 0
    rule = _make_rule(args.rule, args.r)
    rows = []
    all_passed = True
    for k in range(1, args.k + 1):
        rep = bound_check(rule, args.d, k, args.samples, args.seed, workers=args.workers)
        rows.append(
            [k, rep.estimate.estimate, rep.estimate.se, rep.bound, rep.margin,
             rep.passed]
        )
        all_passed &= rep.passed
    if args.format == "csv":
        _emit_csv(["k", "estimate", "se", "bound", "margin", "passed"], rows, args.output)
    else:
        _emit_json(
            {
                "schema": "bound_check",
                "rule": rule.name,
                "d": args.d,
                "samples": args.samples,
                "seed": args.seed,
                "rows": [
                    dict(zip(["k", "estimate", "se", "bound", "margin", "passed"], r))
                    for r in rows
                ],
                "all_passed": all_passed,
            },
            args.output,
        )
    return 0 if all_passed else CHECK_FAILED_EXIT


def cmd_ballsum(args) -> int:
    if args.limit:
        _write(_fmt(ballsum_limits(args.d, args.k)) + "\n", args.output)
        return 0
    value = ballsum_corr_exact(args.d, args.r, args.k)
    _write(_fmt(value if args.exact else float(value)) + "\n", args.output)
    return 0


def cmd_corr(args) -> int:
    rule = _make_rule(args.rule, args.r)
    est = mc_correlation(
        rule, args.d, args.k, args.samples, args.seed, workers=args.workers
    )
    payload = {
        "schema": "mc_correlation",
        "rule": rule.name,
        "d": args.d,
        "k": args.k,
        "samples": est.samples,
        "seed": args.seed,
        "estimate": est.estimate,
        "se": est.se,
    }
    if args.format == "csv":
        _emit_csv(
            ["rule", "d", "k", "samples", "seed", "estimate", "se"],
            [[rule.name, args.d, args.k, est.samples, args.seed, est.estimate, est.se]],
            args.output,
        )
    else:
        _emit_json(payload, args.output)
    return 0


def cmd_seq(args) -> int:
    eta = _parse_measure(args.measure, args.d, args.grid_size)
    seq = corr_sequence_from_measure(args.d, eta, args.K)
    if args.format == "csv":
        _emit_csv(
            ["k", "x_k"], [[k, float(v)] for k, v in enumerate(seq.values)], args.output
        )
    else:
        _emit_json(
            {
                "schema": "correlation_sequence",
                "d": args.d,
                "measure": args.measure,
                "values": [float(v) for v in seq.values],
            },
            args.output,
        )
    return 0


def cmd_kesten_mckay(args) -> int:
    if args.moment is not None:
        _write(_fmt(km_moment(args.d, args.moment, args.grid_size)) + "\n", args.output)
        return 0
    lo, hi = km_support(args.d)
    ts = np.linspace(lo, hi, args.grid_size)
    dens = km_density(args.d, ts)
    if args.format == "csv":
        _emit_csv(["t", "density"], [[float(t), float(f)] for t, f in zip(ts, dens)], args.output)
    else:
        _emit_json(
            {
                "schema": "kesten_mckay_density",
                "d": args.d,
                "support": [lo, hi],
                "t": [float(t) for t in ts],
                "density": [float(f) for f in dens],
            },
            args.output,
        )
    return 0


def cmd_walks(args) -> int:
    if args.radius is not None:
        probs = [hit_ball_prob(args.d, k, args.radius) for k in range(args.k_max + 1)]
        rows = [[k, p, float(p)] for k, p in enumerate(probs)]
        header = ["k", "probability", "probability_float"]
        schema = "hit_ball_probabilities"
    else:
        table = asymptote_check(args.d, args.k_max)
        rows = [
            [k, p, root] for k, p, root in zip(table.ks, table.probs, table.roots)
        ]
        header = ["k", "return_probability_2k", "root_2k"]
        schema = "walk_asymptote"
    if args.format == "csv":
        _emit_csv(header, rows, args.output)
    else:
        _emit_json(
            {
                "schema": schema,
                "d": args.d,
                "rows": [dict(zip(header, row)) for row in rows],
            },
            args.output,
        )
    return 0


def cmd_spectrum(args) -> int:
    graph = _read_graph(args.input)
    report = is_ramanujan(graph, tol=args.tol, seed=args.seed)
    _emit_json(
        {
            "schema": "spectral_report",
            "d": report.d,
            "n": report.n,
            "rho_estimate": report.rho_estimate,
            "ramanujan_threshold": report.ramanujan_threshold,
            "is_ramanujan": report.is_ramanujan,
            "iterations": report.iterations,
            "residual": report.residual,
        },
        args.output,
    )
    return 0


def cmd_rho_subsets(args) -> int:
    graph = _read_graph(args.input)
    value = rho_via_subsets(graph, args.k_max)
    _emit_json(
        {"schema": "rho_via_subsets", "n": graph.n, "d": graph.d,
         "k_max": args.k_max, "value": value},
        args.output,
    )
    return 0


def cmd_gaussian(args) -> int:
    patch = build_tree_patch(args.d, args.k, args.r)
    needed_K = args.k + 2 * args.r
    if args.kernel is not None:
        values = [float(x) for x in args.kernel.split(",")]
        kernel = DistanceKernel(d=args.d, values=np.array(values))
    else:
        eta = _parse_measure(args.measure, args.d, args.grid_size)
        seq = corr_sequence_from_measure(args.d, eta, needed_K)
        kernel = DistanceKernel.from_sequence(seq)
    samples = sample_gaussian(kernel, patch, args.samples, args.seed)
    if args.emit == "samples":
        header = [f"x{i}" for i in range(patch.n)]
        if args.format == "csv":
            _emit_csv(header, [list(map(float, row)) for row in samples], args.output)
        else:
            _emit_json(
                {
                    "schema": "gaussian_samples",
                    "d": args.d, "k": args.k, "r": args.r,
                    "samples": [[float(x) for x in row] for row in samples],
                },
                args.output,
            )
        return 0
    gram = gram_matrix(kernel, patch)
    min_eig, _ = psd_check(gram)
    emp = np.corrcoef(samples[:, patch.v], samples[:, patch.w])[0, 1]
    _emit_json(
        {
            "schema": "gaussian_summary",
            "d": args.d, "k": args.k, "r": args.r,
            "patch_size": patch.n,
            "kernel": [float(x) for x in kernel.values],
            "min_eigenvalue": min_eig,
            "expected_corr_vw": float(kernel.values[args.k]),
            "empirical_corr_vw": float(emp),
            "n_samples": args.samples,
            "seed": args.seed,
        },
        args.output,
    )
    return 0


def cmd_gen_graph(args) -> int:
    graph = random_regular_graph(args.n, args.d, args.min_girth, args.seed)
    _write(graph.to_edge_list(), args.output)
    return 0


def cmd_girth(args) -> int:
    g = girth(_read_graph(args.input))
    _write(("inf" if math.isinf(g) else str(int(g))) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrtree",
        description="Correlation decay of local rules on regular trees and graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, fmt=True):
        p.add_argument("--output", default=None, help="write to file instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if fmt:
            p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("bound", help="correlation bound, optionally checked against MC")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rule", choices=["ballsum", "minlabel"], default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("ballsum", help="exact ball-sum correlation or its r->inf limit")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="print as exact rational p/q")
    p.add_argument("--limit", action="store_true", help="print the r->inf limit")
    common(p, seed=False, fmt=False)
    p.set_defaults(func=cmd_ballsum)

    p = sub.add_parser("corr", help="Monte Carlo correlation of a rule at distance k")
    p.add_argument("--rule", choices=["ballsum", "minlabel"], required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common(p)
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("seq", help="correlation sequence of a measure on [-1,1]")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--measure", required=True,
                   help="km | uniform | point:X | points:X:W,...")
    p.add_argument("--grid-size", type=int, default=20000)
    common(p, seed=False)
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("kesten-mckay", help="spectral density of T_d, or one moment")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--grid-size", type=int, default=20000)
    p.add_argument("--moment", type=int, default=None)
    common(p, seed=False)
    p.set_defaults(func=cmd_kesten_mckay)

    p = sub.add_parser("walks", help="return/hitting probabilities of the tree walk")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--radius", type=int, default=None,
                   help="tabulate hitting of the radius-R ball instead")
    common(p, seed=False)
    p.set_defaults(func=cmd_walks)

    p = sub.add_parser("spectrum", help="spectral report for an edge-list graph")
    p.add_argument("--input", required=True, help="edge-list file, or - for stdin")
    p.add_argument("--tol", type=float, default=1e-6)
    common(p, fmt=False)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("rho-subsets", help="subset-based lower bound on rho")
    p.add_argument("--input", required=True)
    p.add_argument("--k-max", type=int, default=40)
    common(p, seed=False, fmt=False)
    p.set_defaults(func=cmd_rho_subsets)

    p = sub.add_parser("gaussian", help="sample the Gaussian process of a kernel")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True, help="endpoint distance of the patch")
    p.add_argument("--r", type=int, default=0, help="patch radius")
    p.add_argument("--kernel", default=None, help="explicit p(0),p(1),... values")
    p.add_argument("--measure", default=None, help="measure spec for the kernel")
    p.add_argument("--grid-size", type=int, default=20000)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--emit", choices=["summary", "samples"], default="summary")
    common(p)
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("gen-graph", help="random regular graph with a girth floor")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--min-girth", type=int, default=3)
    common(p, fmt=False)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("girth", help="shortest cycle length of an edge-list graph")
    p.add_argument("--input", required=True)
    common(p, seed=False, fmt=False)
    p.set_defaults(func=cmd_girth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help; anything else is a usage error
        return 0 if exc.code == 0 else USAGE_ERROR_EXIT
    if getattr(args, "command", None) == "gaussian":
        if (args.kernel is None) == (args.measure is None):
            print("gaussian: provide exactly one of --kernel or --measure",
                  file=sys.stderr)
            return USAGE_ERROR_EXIT
    try:
        return args.func(args)
    except (
        ValueError,
        GraphGenerationError,
        BallStructureError,
        DegenerateOutputError,
        PowerIterationError,
        OSError,
    ) as exc:
        print(f"corrtree: {exc}", file=sys.stderr)
        return USAGE_ERROR_EXIT


if __name__ == "__main__":
    sys.exit(main())
