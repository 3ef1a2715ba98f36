"""Command-line interface: reports, determinism, exit codes."""

import json
import math

import numpy as np
import pytest

from hardyspec import cli


def run(tmp_path, capsys, command, config, extra=None):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config), encoding="utf-8")
    argv = [command, "--config", str(cfg_path)] + (extra or [])
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def test_classify_hyperbolic_supercritical(tmp_path, capsys):
    cfg = {
        "model": "hyperbolic",
        "n": 2,
        "kappa": 1.0,
        "envelope": {"side": "upper", "c": 1.0, "delta": 0.5, "R0": 1.0},
    }
    code, out = run(tmp_path, capsys, "classify", cfg)
    assert code == 0
    payload = json.loads(out)
    assert payload["result"] == "Infinite"
    assert payload["threshold"] == pytest.approx(0.25)
    assert payload["rule"] == "hyperbolic_upper_supercritical"
    assert payload["version"]


def test_geometry_csv_weight_column(tmp_path, capsys):
    cfg = {
        "model": {"profile": "euclidean", "n": 3, "R": 1.0},
        "radii": {"start": 1.0, "stop": 10.0, "count": 50, "spacing": "log"},
    }
    code, out = run(tmp_path, capsys, "geometry", cfg)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "r,A,B,C,s,W,boundary_coeff"
    for line in lines[1:]:
        fields = [float(x) for x in line.split(",")]
        r, w = fields[0], fields[5]
        assert w == pytest.approx(1.0 / (4.0 * r**2), rel=1e-12)


def test_csv_floats_round_trip(tmp_path, capsys):
    cfg = {
        "model": {"profile": "hyperbolic", "n": 3, "kappa": 1.0, "R": 0.5},
        "radii": {"values": [0.7, 1.0, 2.0, math.pi]},
    }
    code, out = run(tmp_path, capsys, "geometry", cfg, ["--out", str(tmp_path / "o")])
    assert code == 0
    text = (tmp_path / "o" / "geometry.csv").read_text()
    from hardyspec import geometry as geo

    g = geo.ModelGeometry(3, geo.Hyperbolic(1.0), 0.5)
    for line in text.strip().splitlines()[1:]:
        fields = line.split(",")
        r = float(fields[0])
        # 17-significant-digit fields reproduce the binary doubles exactly
        assert float(fields[1]) == geo.laplacian_r(g, r)
        assert float(fields[5]) == geo.hardy_weight(g, r)


def test_count_report_and_determinism(tmp_path, capsys):
    cfg = {
        "model": {"profile": "euclidean", "n": 3, "R": 1.0},
        "potential": {"kind": "inverse_square", "c": 13.0},
        "sweep": {"L": [100.0, 1000.0, 10000.0]},
        "points_per_decade": 500,
        "seed": 7,
    }
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    code, _ = run(tmp_path, capsys, "count", cfg, ["--out", str(out1)])
    assert code == 0
    code, _ = run(tmp_path, capsys, "count", cfg, ["--out", str(out2)])
    assert code == 0
    assert (out1 / "count.csv").read_bytes() == (out2 / "count.csv").read_bytes()
    assert (out1 / "count_summary.json").read_bytes() == (out2 / "count_summary.json").read_bytes()
    summary = json.loads((out1 / "count_summary.json").read_text())
    assert summary["counts"] == [2, 3, 5]
    assert summary["classification"] == "Growing"
    assert summary["threshold"] == 0.0
    csv_lines = (out1 / "count.csv").read_text().strip().splitlines()
    assert csv_lines[0] == "L,N,count"
    assert len(csv_lines) == 4


def test_count_empty_sweep_is_config_error(tmp_path, capsys):
    cfg = {
        "model": {"profile": "euclidean", "n": 3, "R": 1.0},
        "potential": {"kind": "zero"},
        "sweep": {"L": []},
    }
    code, _ = run(tmp_path, capsys, "count", cfg)
    assert code == 2


def test_unknown_field_rejected(tmp_path, capsys):
    cfg = {
        "model": {"profile": "euclidean", "n": 3, "R": 1.0, "bogus": 1},
        "radii": {"values": [1.0]},
    }
    code, _ = run(tmp_path, capsys, "geometry", cfg)
    assert code == 2


def test_domain_error_exit_code(tmp_path, capsys):
    cfg = {
        "model": {"profile": "hyperbolic", "n": 3, "kappa": -1.0, "R": 1.0},
        "radii": {"values": [1.0]},
    }
    code, _ = run(tmp_path, capsys, "geometry", cfg)
    assert code == 3


def test_command_mismatch_rejected(tmp_path, capsys):
    cfg = {"command": "count", "model": "euclidean"}
    code, _ = run(tmp_path, capsys, "classify", cfg)
    assert code == 2


def test_witness_report(tmp_path, capsys):
    cfg = {
        "model": {"profile": "euclidean", "n": 3, "R": 1.0},
        "potential": {"kind": "inverse_square", "c": 5.0},
        "witness": {"excess": 4.0, "R_start": 1.0, "m": 2},
    }
    code, out = run(tmp_path, capsys, "witness", cfg, ["--out", str(tmp_path / "w")])
    assert code == 0
    payload = json.loads(out)
    assert payload["k_min"] == 41
    entries = payload["entries"]
    assert [e["support"] for e in entries] == [[1.0, 82.0], [82.0, 6724.0]]
    assert all(e["form_value"] < 0.0 for e in entries)
    assert all(e["form_value"] <= e["analytic_bound"] + 1e-6 for e in entries)
    assert (tmp_path / "w" / "witness.json").exists()


def test_witness_envelope_violation_is_domain_error(tmp_path, capsys):
    cfg = {
        "model": {"profile": "euclidean", "n": 3, "R": 1.0},
        "potential": {"kind": "zero"},
        "witness": {"excess": 4.0, "R_start": 1.0, "m": 1},
    }
    code, _ = run(tmp_path, capsys, "witness", cfg)
    assert code == 3


@pytest.mark.parametrize("suite", ["hardy", "uncertainty", "identity"])
def test_verify_suites(tmp_path, capsys, suite):
    cfg = {"suite": suite, "cases": 10, "seed": 3}
    code, out = run(tmp_path, capsys, "verify", cfg)
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert payload["seed"] == 3


def test_verify_deterministic_with_seed(tmp_path, capsys):
    cfg = {"suite": "hardy", "cases": 5}
    _, out1 = run(tmp_path, capsys, "verify", cfg, ["--seed", "11"])
    _, out2 = run(tmp_path, capsys, "verify", cfg, ["--seed", "11"])
    assert out1 == out2
    _, out3 = run(tmp_path, capsys, "verify", cfg, ["--seed", "12"])
    assert out1 != out3


def test_plot_flag_renders_figures(tmp_path, capsys):
    cfg = {
        "model": {"profile": "euclidean", "n": 4, "R": 1.0},
        "radii": {"start": 1.0, "stop": 100.0, "count": 64, "spacing": "log"},
    }
    out = tmp_path / "figs"
    code, _ = run(tmp_path, capsys, "geometry", cfg, ["--out", str(out), "--plot"])
    assert code == 0
    png = out / "geometry.png"
    assert png.exists() and png.stat().st_size > 1000
    # --plot without --out is a usage error
    code, _ = run(tmp_path, capsys, "geometry", cfg, ["--plot"])
    assert code == 2


def test_count_plot(tmp_path, capsys):
    cfg = {
        "model": {"profile": "euclidean", "n": 3, "R": 1.0},
        "potential": {"kind": "inverse_square", "c": 13.0},
        "sweep": {"L": [100.0, 1000.0]},
        "points_per_decade": 300,
    }
    out = tmp_path / "c"
    code, _ = run(tmp_path, capsys, "count", cfg, ["--out", str(out), "--plot"])
    assert code == 0
    assert (out / "count.png").exists()


def test_bad_json_config(tmp_path, capsys):
    cfg_path = tmp_path / "broken.json"
    cfg_path.write_text("{not json", encoding="utf-8")
    code = cli.main(["geometry", "--config", str(cfg_path)])
    capsys.readouterr()
    assert code == 2


def test_classify_pinched_via_cli(tmp_path, capsys):
    cfg = {"model": "pinched", "n": 3, "kappa": 1.0, "delta1": 0.0, "delta2": 0.0}
    code, out = run(tmp_path, capsys, "classify", cfg)
    assert code == 0
    payload = json.loads(out)
    assert payload["result"] == "Finite"
    assert payload["threshold"] == pytest.approx(1.0)


def test_geometry_reduced_potential_csv(tmp_path, capsys):
    cfg = {
        "model": {"profile": "hyperbolic", "n": 3, "kappa": 1.0, "R": 0.5},
        "potential": {"kind": "zero"},
        "radii": {"values": [1.0, 2.0, 5.0]},
    }
    out = tmp_path / "g"
    code, _ = run(tmp_path, capsys, "geometry", cfg, ["--out", str(out)])
    assert code == 0
    lines = (out / "reduced.csv").read_text().strip().splitlines()
    assert lines[0] == "t,Q"
    for line in lines[1:]:
        t, q = (float(x) for x in line.split(","))
        assert q == pytest.approx(1.0, rel=1e-13)  # constant reduced potential
