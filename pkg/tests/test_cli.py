import json

import pytest

from corrtree.cli import main
from corrtree.correlation import BoundCheckReport, EstimateWithError

from helpers import complete_graph


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bound_prints_value(capsys):
    code, out, _ = run_cli(capsys, ["bound", "--d", "3", "--k", "2"])
    assert code == 0
    assert out.strip() == "0.833333"


def test_ballsum_exact_and_limit(capsys):
    code, out, _ = run_cli(capsys, ["ballsum", "--d", "3", "--r", "2", "--k", "2", "--exact"])
    assert code == 0 and out.strip() == "2/5"
    code, out, _ = run_cli(capsys, ["ballsum", "--d", "3", "--k", "2", "--limit"])
    assert code == 0 and out.strip() == "0.5"


def test_girth_on_k4(tmp_path, capsys):
    path = tmp_path / "k4.txt"
    path.write_text(complete_graph(4).to_edge_list())
    code, out, _ = run_cli(capsys, ["girth", "--input", str(path)])
    assert code == 0 and out.strip() == "3"


def test_spectrum_report_schema(tmp_path, capsys):
    path = tmp_path / "k4.txt"
    path.write_text(complete_graph(4).to_edge_list())
    code, out, _ = run_cli(capsys, ["spectrum", "--input", str(path)])
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == "spectral_report"
    assert report["rho_estimate"] == pytest.approx(1.0, abs=1e-5)
    assert report["is_ramanujan"] is True


def test_rho_subsets(tmp_path, capsys):
    path = tmp_path / "k4.txt"
    path.write_text(complete_graph(4).to_edge_list())
    code, out, _ = run_cli(capsys, ["rho-subsets", "--input", str(path), "--k-max", "10"])
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(1.0, abs=1e-6)


def test_gen_graph_deterministic_and_valid(capsys):
    argv = ["gen-graph", "--n", "20", "--d", "3", "--min-girth", "4", "--seed", "7"]
    code, out1, _ = run_cli(capsys, argv)
    assert code == 0
    code, out2, _ = run_cli(capsys, argv)
    assert out1 == out2
    assert out1.splitlines()[0] == "20 3"
    assert len(out1.splitlines()) == 1 + 30     # header + n*d/2 edges


def test_gen_graph_parity_error(capsys):
    code, out, err = run_cli(capsys, ["gen-graph", "--n", "5", "--d", "3"])
    assert code == 1
    assert out == ""
    assert "even" in err


def test_corr_json_and_determinism(capsys):
    argv = ["corr", "--rule", "ballsum", "--r", "1", "--d", "3", "--k", "2",
            "--samples", "5000", "--seed", "3", "--workers", "1"]
    code, out1, _ = run_cli(capsys, argv)
    assert code == 0
    payload = json.loads(out1)
    assert payload["schema"] == "mc_correlation"
    assert abs(payload["estimate"] - 0.25) < 0.05
    code, out2, _ = run_cli(capsys, argv)
    assert out1 == out2
    # output is independent of the worker count as well
    code, out3, _ = run_cli(capsys, argv[:-1] + ["4"])
    assert out1 == out3


def test_seq_csv_delta_one(capsys):
    code, out, _ = run_cli(
        capsys,
        ["seq", "--d", "3", "--K", "2", "--measure", "point:1", "--format", "csv"],
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,x_k"
    assert lines[1] == "0,1"
    assert lines[2] == "1,0.942809"
    assert lines[3] == "2,0.833333"


def test_kesten_mckay_moment(capsys):
    code, out, _ = run_cli(capsys, ["kesten-mckay", "--d", "3", "--moment", "2"])
    assert code == 0
    assert out.strip() == "3"


def test_walks_table_has_rationals(capsys):
    code, out, _ = run_cli(
        capsys, ["walks", "--d", "3", "--k-max", "2", "--format", "csv"]
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,return_probability_2k,root_2k"
    assert lines[1].startswith("1,1/3,")
    assert lines[2].startswith("2,5/27,")


def test_gaussian_summary(capsys):
    code, out, _ = run_cli(
        capsys,
        ["gaussian", "--d", "3", "--k", "2", "--r", "0", "--measure", "point:1",
         "--samples", "2000", "--seed", "1"],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "gaussian_summary"
    assert payload["expected_corr_vw"] == pytest.approx(0.833333, abs=1e-5)


def test_gaussian_requires_one_kernel_source(capsys):
    code, _, err = run_cli(capsys, ["gaussian", "--d", "3", "--k", "1"])
    assert code == 1 and "kernel" in err
    code, _, err = run_cli(
        capsys,
        ["gaussian", "--d", "3", "--k", "1", "--kernel", "1,0.5",
         "--measure", "point:0"],
    )
    assert code == 1


def test_usage_errors_exit_one(capsys):
    assert run_cli(capsys, ["bound"])[0] == 1            # missing required flags
    assert run_cli(capsys, ["no-such-command"])[0] == 1


def test_help_exits_zero(capsys):
    assert run_cli(capsys, ["--help"])[0] == 0


def test_bound_check_failure_exits_two(capsys, monkeypatch):
    failing = BoundCheckReport(
        rule_name="ballsum(r=1)", d=3, k=1,
        estimate=EstimateWithError(estimate=0.99, se=0.001, samples=1000, seed=0),
        bound=0.9428, margin=-0.047, passed=False,
    )
    monkeypatch.setattr("corrtree.cli.bound_check", lambda *a, **kw: failing)
    code, out, _ = run_cli(
        capsys,
        ["bound", "--d", "3", "--k", "1", "--rule", "ballsum", "--r", "1",
         "--samples", "1000"],
    )
    assert code == 2
    assert json.loads(out)["all_passed"] is False


def test_bound_check_with_rule_passes(capsys):
    code, out, _ = run_cli(
        capsys,
        ["bound", "--d", "3", "--k", "2", "--rule", "ballsum", "--r", "1",
         "--samples", "20000", "--seed", "2", "--workers", "1", "--format", "csv"],
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,estimate,se,bound,margin,passed"
    assert len(lines) == 3
    assert all(line.endswith("True") for line in lines[1:])
