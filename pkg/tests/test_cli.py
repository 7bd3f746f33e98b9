"""Tests for the odp command line."""

import json

import pytest

from odp.cli.main import build_parser, run
from odp.cli.output import read_report, read_table
from odp.cli.rescale import unit_sphere_parameters


def test_parser_knows_every_command():
    parser = build_parser()
    for command in ["radial", "exterior", "spectrum", "dtn", "lambda-star", "sweep", "branch", "verify"]:
        args = parser.parse_args([command])
        assert args.command == command
    args = parser.parse_args(["rescale", "--input", "cert.json", "--row", "2"])
    assert args.row == 2


def test_unknown_command_exits_2():
    assert run(["bogus"]) == 2


def test_invalid_exponent_exits_2(tmp_path):
    """p at the critical exponent is rejected before any solve."""
    assert run(["radial", "--d", "3", "--p", "5", "--lambda", "1", "--out", str(tmp_path / "u.csv")]) == 2
    assert not (tmp_path / "u.csv").exists()


def test_missing_lambda_exits_2(tmp_path):
    assert run(["radial", "--k", "0.2", "--out", str(tmp_path / "u.csv")]) == 2


def test_bad_number_list_exits_2():
    assert run(["branch", "--amplitudes", "1e-3,x"]) == 2


def test_radial_command_and_config_round_trip(tmp_path):
    """--save-config then --config reproduces the run and the saved file."""
    out = tmp_path / "u.csv"
    saved = tmp_path / "run.yaml"
    argv = ["radial", "--k", "0.2", "--lambda", "1.0", "--n-r", "200", "--n-exterior", "1200"]
    assert run(argv + ["--out", str(out), "--save-config", str(saved)]) == 0

    table, meta = read_table(str(out))
    assert list(table.columns) == ["r", "u", "du"]
    assert len(table) == 201
    assert meta["command"] == "radial"
    assert meta["k"] == 0.2
    assert meta["n_r"] == 200
    assert meta["residual"] <= 1e-10
    assert table["u"].iloc[0] == 0.0

    again = tmp_path / "u2.csv"
    resaved = tmp_path / "run2.yaml"
    assert run(["radial", "--config", str(saved), "--out", str(again), "--save-config", str(resaved)]) == 0
    assert saved.read_text() == resaved.read_text()
    table2, _ = read_table(str(again))
    assert table2["u"].tolist() == pytest.approx(table["u"].tolist(), abs=1e-12)


def test_rescale_certificate(tmp_path):
    cert = {"certificate": {"k": 0.2, "d": 2, "p": 3.0, "lambda_star": 1.0, "n_r": 200}}
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(cert))
    out = tmp_path / "rescale.json"
    assert run(["rescale", "--input", str(path), "--out", str(out)]) == 0
    result = read_report(str(out))["rescale"]
    assert result["epsilon"] == pytest.approx(0.04)
    assert result["ball_radius"] == pytest.approx(0.2)
    assert result["mapped_residual"] < 1e-8
    assert result["du_at_boundary"] == pytest.approx(result["du_at_boundary_expected"], rel=1e-6)


def test_rescale_needs_lambda_star(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"k": 0.2, "p": 3.0}))
    assert run(["rescale", "--input", str(path), "--out", str(tmp_path / "r.json")]) == 2


def test_unit_sphere_parameters():
    assert unit_sphere_parameters(2.0, 0.1) == {"epsilon": pytest.approx(0.02), "ball_radius": 0.1, "sphere_radius": 1.0}


def test_dtn_command_writes_report_and_h_table(tmp_path):
    out = tmp_path / "report.json"
    argv = ["dtn", "--k", "0.2", "--lambda", "1.0", "--n-r", "200", "--n-exterior", "1200", "--out", str(out)]
    assert run(argv) == 0
    report = read_report(str(out))
    assert report["meta"]["command"] == "dtn"
    assert report["dtn"]["sigma1"] == pytest.approx(report["meta"]["sigma1"])
    table, meta = read_table(str(tmp_path / "report_h.csv"))
    assert list(table.columns) == ["l", "mu", "mult", "h"]
    assert table["l"].tolist() == sorted(table["l"].tolist())
    assert meta["index"] == report["dtn"]["index"]


def test_unit_sphere_parameters_identity_and_small_k():
    assert unit_sphere_parameters(1.0, 0.1)["epsilon"] == pytest.approx(0.01)
    assert unit_sphere_parameters(0.7, 1.0)["epsilon"] == pytest.approx(0.7)
