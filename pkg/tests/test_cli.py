import json
import os
import subprocess
import sys

import numpy as np
import pytest

from blockenc.cli import main
from blockenc.io import save_matrix


def write_config(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture
def cov_fixture(tmp_path):
    mat = tmp_path / "cov.txt"
    save_matrix(str(mat), np.diag([0.9, 0.3, 0.1]))
    return tmp_path, str(mat)


def test_pca_power_end_to_end(cov_fixture):
    tmp, mat = cov_fixture
    out = tmp / "report.json"
    cfg = write_config(
        tmp / "cfg.json",
        {
            "pipeline": "pca-power",
            "matrix": mat,
            "params": {"r": 2, "eps": 1e-6},
        },
    )
    assert main(["--config", cfg, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    vals = rep["payload"]["eigenvalues"]
    assert vals[0] == pytest.approx(0.9, abs=1e-6)
    assert vals[1] == pytest.approx(0.3, abs=1e-6)
    assert rep["config"]["pipeline"] == "pca-power"


def test_pca_power_from_dataset(tmp_path):
    ds = tmp_path / "data.txt"
    save_matrix(str(ds), np.array([[1.0, 0.0], [0.0, 1.0]]))
    out = tmp_path / "r.json"
    cfg = write_config(
        tmp_path / "cfg.json",
        {"pipeline": "pca-power", "dataset": str(ds), "params": {"r": 1, "eps": 1e-6}},
    )
    assert main(["--config", cfg, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["payload"]["eigenvalues"][0] == pytest.approx(0.25, abs=1e-8)


def test_reports_are_deterministic(cov_fixture):
    tmp, mat = cov_fixture
    cfg = write_config(
        tmp / "cfg.json",
        {"pipeline": "pca-power", "matrix": mat, "params": {"r": 2, "eps": 1e-6}},
    )
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp / name
        assert main(["--config", cfg, "--out", str(out), "--seed", "7"]) == 0
        outs.append(json.loads(out.read_text())["payload"])
    assert json.dumps(outs[0], sort_keys=True) == json.dumps(outs[1], sort_keys=True)


def test_seed_does_not_move_eigenvalues(cov_fixture):
    tmp, mat = cov_fixture
    cfg = write_config(
        tmp / "cfg.json",
        {"pipeline": "pca-power", "matrix": mat, "params": {"r": 1, "eps": 1e-6}},
    )
    vals = []
    for seed in ("3", "4"):
        out = tmp / f"s{seed}.json"
        assert main(["--config", cfg, "--out", str(out), "--seed", seed]) == 0
        vals.append(json.loads(out.read_text())["payload"]["eigenvalues"][0])
    assert vals[0] == pytest.approx(vals[1], abs=1e-9)


def test_missing_input_exits_2_without_output(tmp_path):
    out = tmp_path / "never.json"
    cfg = write_config(
        tmp_path / "cfg.json",
        {"pipeline": "pca-power", "matrix": str(tmp_path / "absent.txt")},
    )
    assert main(["--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()


def test_malformed_config_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad)]) == 2


def test_unknown_pipeline_exits_2(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", {"pipeline": "frobnicate"})
    assert main(["--config", cfg]) == 2


def test_numeric_failure_exits_3(tmp_path):
    mat = tmp_path / "a.txt"
    save_matrix(str(mat), np.diag([0.5, 1e-9]))
    vec = tmp_path / "b.txt"
    save_matrix(str(vec), np.array([1.0, 0.0]))
    out = tmp_path / "r.json"
    cfg = write_config(
        tmp_path / "cfg.json",
        {"pipeline": "solve", "matrix": str(mat), "vector": str(vec)},
    )
    assert main(["--config", cfg, "--out", str(out)]) == 3
    assert not out.exists()


def test_solve_report_and_csv(tmp_path):
    mat = tmp_path / "a.txt"
    save_matrix(str(mat), np.diag([0.8, 0.4]))
    vec = tmp_path / "b.txt"
    save_matrix(str(vec), np.array([1.0, 1.0]) / np.sqrt(2.0))
    cfg = write_config(
        tmp_path / "cfg.json",
        {"pipeline": "solve", "matrix": str(mat), "vector": str(vec)},
    )
    out_json = tmp_path / "r.json"
    assert main(["--config", cfg, "--out", str(out_json)]) == 0
    rep = json.loads(out_json.read_text())
    assert rep["payload"]["report"]["fidelity"] >= 1.0 - 1e-6
    assert rep["payload"]["report"]["route"] == "psd-gram"

    out_csv = tmp_path / "r.csv"
    assert main(["--config", cfg, "--out", str(out_csv), "--format", "csv"]) == 0
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0] == "name,value"
    names = {ln.split(",")[0] for ln in lines[1:]}
    assert "report.fidelity" in names


def test_simulate_direct_with_vector(tmp_path):
    mat = tmp_path / "h.txt"
    save_matrix(str(mat), np.diag([0.5, -0.5]))
    vec = tmp_path / "psi.txt"
    save_matrix(str(vec), np.array([1.0, 1.0]) / np.sqrt(2.0))
    out = tmp_path / "r.json"
    cfg = write_config(
        tmp_path / "cfg.json",
        {
            "pipeline": "simulate-direct",
            "matrix": str(mat),
            "vector": str(vec),
            "params": {"t": 3.14159, "eps": 1e-6},
        },
    )
    assert main(["--config", cfg, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["payload"]["state_fidelity"] >= 1.0 - 1e-6
    assert rep["payload"]["report"]["unitarity_defect"] <= 1e-5


def test_costs_table_json_and_csv(tmp_path):
    cfg_dict = {
        "pipeline": "costs",
        "rows": ["solver", "harrow2009"],
        "params": {"s": 8, "n": 256, "kappa": 20, "eps": 1e-4, "normF": 1.0},
    }
    out = tmp_path / "costs.json"
    cfg = write_config(tmp_path / "cfg.json", cfg_dict)
    assert main(["--config", cfg, "--out", str(out)]) == 0
    rows = json.loads(out.read_text())["payload"]["table"]["rows"]
    assert [r["name"] for r in rows] == ["solver", "harrow2009"]
    assert rows[0]["ratio_to_first"] == 1.0

    out_csv = tmp_path / "costs.csv"
    assert main(["--config", cfg, "--out", str(out_csv), "--format", "csv"]) == 0
    text = out_csv.read_text()
    assert text.startswith("name,source,symbolic")
    assert text.strip().endswith("log = natural log")


def test_costs_unknown_row_exits_2(tmp_path):
    cfg = write_config(
        tmp_path / "cfg.json",
        {"pipeline": "costs", "rows": ["nonsense-row"], "params": {}},
    )
    assert main(["--config", cfg]) == 2


def test_sweep_writes_aggregate_and_per_value_reports(tmp_path):
    mat = tmp_path / "h.txt"
    save_matrix(str(mat), np.diag([0.5, -0.5]))
    vec = tmp_path / "psi.txt"
    save_matrix(str(vec), np.array([1.0, 0.0]))
    out = tmp_path / "sweep.csv"
    cfg = write_config(
        tmp_path / "cfg.json",
        {
            "pipeline": "simulate-ode",
            "matrix": str(mat),
            "vector": str(vec),
            "params": {"t": 1.0, "K": 1},
        },
    )
    assert main(["--config", cfg, "--out", str(out), "--sweep", "N=8,16"]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].split(",")[0] == "N"
    assert len(lines) == 3
    for idx in (0, 1):
        side = tmp_path / f"sweep.csv.{idx:02d}.json"
        assert side.exists()
        json.loads(side.read_text())
    header = lines[0].split(",")
    kcol = header.index("report.kappa_system")
    k8 = float(eval(lines[1].split(",")[kcol]))
    k16 = float(eval(lines[2].split(",")[kcol]))
    assert k16 > k8


def test_sweep_eps_on_solver(tmp_path):
    mat = tmp_path / "a.txt"
    save_matrix(str(mat), np.diag([0.8, 0.4]))
    vec = tmp_path / "b.txt"
    save_matrix(str(vec), np.array([1.0, 1.0]) / np.sqrt(2.0))
    out = tmp_path / "s.csv"
    cfg = write_config(
        tmp_path / "cfg.json",
        {"pipeline": "solve", "matrix": str(mat), "vector": str(vec)},
    )
    assert main(["--config", cfg, "--out", str(out), "--sweep", "eps=0.01,0.0001"]) == 0
    lines = out.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "eps"
    fcol = header.index("report.fidelity")
    fids = [float(eval(ln.split(",")[fcol])) for ln in lines[1:]]
    assert all(f >= 1.0 - 1e-3 for f in fids)


def test_sweep_without_values_exits_2(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", {"pipeline": "costs", "rows": ["solver"]})
    assert main(["--config", cfg, "--sweep", "eps="]) == 2
    assert main(["--config", cfg, "--sweep", "noequals"]) == 2


def test_report_to_stdout(cov_fixture, capsys):
    tmp, mat = cov_fixture
    cfg = write_config(
        tmp / "cfg.json",
        {"pipeline": "pca-power", "matrix": mat, "params": {"r": 1, "eps": 1e-4}},
    )
    assert main(["--config", cfg]) == 0
    text = capsys.readouterr().out
    rep = json.loads(text)
    assert rep["payload"]["eigenvalues"][0] == pytest.approx(0.9, abs=1e-4)


def test_module_invocation(tmp_path):
    cfg = write_config(
        tmp_path / "cfg.json",
        {
            "pipeline": "costs",
            "rows": ["solver"],
            "params": {"s": 4, "n": 16, "kappa": 5, "eps": 1e-3, "normF": 1.0},
        },
    )
    proc = subprocess.run(
        [sys.executable, "-m", "blockenc.cli", "--config", cfg],
        capture_output=True,
        text=True,
        cwd=str(tmp_path),
    )
    assert proc.returncode == 0
    assert '"table"' in proc.stdout


def test_positional_pipeline_overrides_config(tmp_path):
    cfg = write_config(
        tmp_path / "cfg.json",
        {
            "pipeline": "solve",
            "rows": ["solver"],
            "params": {"s": 4, "n": 16, "kappa": 5, "eps": 1e-3, "normF": 1.0},
        },
    )
    out = tmp_path / "o.json"
    assert main(["costs", "--config", cfg, "--out", str(out)]) == 0
    assert "table" in json.loads(out.read_text())["payload"]
