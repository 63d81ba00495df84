import json
import math
from pathlib import Path

import numpy as np
import pytest

from weyllab.cli import main, parse_grid, config_hash

from oracles import brute_torus_count


def write_cfg(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def test_parse_grid_forms():
    assert parse_grid([1.0, 2.0]) == [1.0, 2.0]
    vals = parse_grid("1:8:geom:4")
    assert vals == pytest.approx([1.0, 2.0, 4.0, 8.0])
    vals = parse_grid("0:1:lin:3")
    assert vals == pytest.approx([0.0, 0.5, 1.0])


def test_config_hash_field_order_stable():
    a = config_hash({"a": 1, "b": [1, 2]})
    b = config_hash({"b": [1, 2], "a": 1})
    assert a == b


def test_recurrence_command_roundtrip(tmp_path):
    cfg = write_cfg(tmp_path, {
        "model": {"kind": "torus", "n": 2},
        "T_grid": [8.0, 10.0],
        "eps_grid": [0.1, 0.2],
        "samples": 2000,
        "seed": 5,
    })
    out = tmp_path / "run1"
    assert main(["--config", cfg, "--out", str(out), "recurrence"]) == 0
    lines = (out / "recurrence.csv").read_text().strip().split("\n")
    assert lines[0] == "model,T,eps,K,samples,seed,volume,ci_low,ci_high,failed_samples"
    assert len(lines) == 5
    for line in lines[1:]:
        fields = line.split(",")
        assert fields[0] == "torus2"
        for v in fields[1:]:
            float(v)          # every numeric field parses as a plain number
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outputs"][0]["path"] == "recurrence.csv"
    assert main(["--out", str(out), "--check"]) == 0


def test_recurrence_worker_independence(tmp_path):
    cfg = write_cfg(tmp_path, {
        "model": {"kind": "torus", "n": 2},
        "T_grid": [8.0],
        "eps_grid": [0.1],
        "samples": 1500,
        "seed": 5,
    })
    out1, out8 = tmp_path / "w1", tmp_path / "w8"
    assert main(["--config", cfg, "--out", str(out1), "--threads", "1",
                 "recurrence"]) == 0
    assert main(["--config", cfg, "--out", str(out8), "--threads", "8",
                 "recurrence"]) == 0
    assert (out1 / "recurrence.csv").read_bytes() == (out8 / "recurrence.csv").read_bytes()


def test_malformed_grid_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {
        "model": {"kind": "torus", "n": 2},
        "T_grid": [],
        "eps_grid": [0.1],
        "seed": 1,
    })
    assert main(["--config", cfg, "--out", str(tmp_path / "o"), "recurrence"]) == 2
    assert "grid" in capsys.readouterr().err


def test_missing_config_exits_2(tmp_path):
    assert main(["--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path), "recurrence"]) == 2
    assert main(["--out", str(tmp_path), "recurrence"]) == 2


def test_numerical_failure_exits_3(tmp_path):
    cfg = write_cfg(tmp_path, {
        "model": {"kind": "torus", "n": 2},
        "lambda_grid": [1e36],
    })
    assert main(["--config", cfg, "--out", str(tmp_path / "o"), "spectrum"]) == 3


def test_plan_command(tmp_path):
    cfg = write_cfg(tmp_path, {"class": "lie_group", "p": 2, "h": 1e-4})
    out = tmp_path / "plan"
    assert main(["--config", cfg, "--out", str(out), "plan"]) == 0
    payload = json.loads((out / "plan.json").read_text())
    assert payload["delta"] == pytest.approx(3.0 / 7.0, rel=1e-15)
    assert payload["T"] == pytest.approx(10 ** (4.0 / 7.0), rel=1e-12)


def test_spectrum_command_matches_oracle(tmp_path):
    cfg = write_cfg(tmp_path, {"model": {"kind": "torus", "n": 2}})
    out = tmp_path / "spec"
    assert main(["--config", cfg, "--out", str(out), "--lambda", "100",
                 "spectrum"]) == 0
    header, row = (out / "spectrum.csv").read_text().strip().split("\n")
    assert header == "model,h,lambda,count,leading"
    fields = row.split(",")
    assert int(fields[3]) == brute_torus_count(2 * math.pi * np.eye(2), 10.0)


def test_returnmap_command_sphere(tmp_path):
    cfg = write_cfg(tmp_path, {"profile": {"preset": "sphere"}, "n_alpha": 64})
    out = tmp_path / "rm"
    assert main(["--config", cfg, "--out", str(out), "returnmap"]) == 0
    lines = (out / "returnmap.csv").read_text().strip().split("\n")
    assert lines[0] == "alpha,tau,theta,clairaut"
    thetas = [float(l.split(",")[2]) for l in lines[1:]]
    assert max(abs(t - math.pi) for t in thetas) < 1e-6


def test_weyl_and_verify_bound_commands(tmp_path):
    cfg = write_cfg(tmp_path, {
        "model": {"kind": "sphere3"},
        "lambda_grid": [float(k * (k + 2)) for k in (3, 5, 8, 13, 21, 34, 55)],
    })
    out = tmp_path / "weyl"
    assert main(["--config", cfg, "--out", str(out), "weyl"]) == 0
    vb_cfg = write_cfg(tmp_path, {
        "in_csv": str(out / "weyl.csv"), "shape": 0.0}, name="vb.json")
    out2 = tmp_path / "vb"
    assert main(["--config", vb_cfg, "--out", str(out2), "verify-bound"]) == 0
    payload = json.loads((out2 / "verify_bound.json").read_text())
    assert payload["passed"] is True


def test_scaling_fit_command(tmp_path):
    csv = tmp_path / "rec.csv"
    rows = ["model,T,eps,K,samples,seed,volume,ci_low,ci_high,failed_samples"]
    for T in (2.0, 4.0, 8.0):
        for eps in (0.1, 0.2, 0.4):
            v = eps ** 2 * T ** 3
            rows.append(f"torus2,{T!r},{eps!r},2.0,1000,0,{v!r},{v!r},{v!r},0")
    csv.write_text("\n".join(rows) + "\n")
    cfg = write_cfg(tmp_path, {"in_csv": str(csv), "mode": "power"})
    out = tmp_path / "fit"
    assert main(["--config", cfg, "--out", str(out), "scaling-fit"]) == 0
    payload = json.loads((out / "scaling_fit.json").read_text())
    assert payload["a_eps"] == pytest.approx(2.0, abs=1e-10)
    assert payload["b_T"] == pytest.approx(3.0, abs=1e-10)


def test_invariants_command(tmp_path):
    cfg = write_cfg(tmp_path, {
        "model": {"kind": "catmap", "matrix": [[2, 1], [1, 1]], "roof": 1.0},
        "seed": 3,
        "t_max": 30.0,
        "orbit_samples": 100,
        "lyap_t_max": 60.0,
        "entropy": {"T_list": [2.0, 3.0, 4.0], "eps_list": [0.5, 0.4],
                    "samples": 1500},
    })
    out = tmp_path / "inv"
    assert main(["--config", cfg, "--out", str(out), "invariants"]) == 0
    lines = (out / "invariants.csv").read_text().strip().split("\n")
    assert lines[0] == "model,lambda_max,lyap1,lyap2,lyap3,chi,h_top,flags"
    fields = lines[1].split(",")
    assert float(fields[1]) == pytest.approx(math.log((3 + math.sqrt(5)) / 2),
                                             rel=0.02)
    ent_lines = (out / "entropy.csv").read_text().strip().split("\n")
    assert ent_lines[0] == "T,eps,N"
    assert len(ent_lines) == 7


def test_grid_flag_overrides_config(tmp_path):
    cfg = write_cfg(tmp_path, {
        "model": {"kind": "torus", "n": 2},
        "T_grid": [8.0, 10.0, 12.0],
        "eps_grid": [0.1],
        "samples": 1000,
        "seed": 5,
    })
    out = tmp_path / "g"
    assert main(["--config", cfg, "--out", str(out),
                 "--t-grid", "8:16:geom:2", "recurrence"]) == 0
    lines = (out / "recurrence.csv").read_text().strip().split("\n")
    assert len(lines) == 3          # 2 T values x 1 eps


def test_manifest_check_detects_tamper(tmp_path):
    cfg = write_cfg(tmp_path, {"class": "surfrev", "r": 1, "h": 1e-3})
    out = tmp_path / "m"
    assert main(["--config", cfg, "--out", str(out), "plan"]) == 0
    (out / "plan.json").write_text("{}")
    assert main(["--out", str(out), "--check"]) == 3
