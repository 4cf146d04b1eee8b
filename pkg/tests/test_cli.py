import json
import subprocess
import sys
from importlib import resources

import pytest

from hypertruss.cli import EXIT_CONFIG, EXIT_SEED, execute, main
from hypertruss.io import read_results_csv

SHIPPED = resources.files("hypertruss") / "data" / "eight-member.json"


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "analyze" in capsys.readouterr().out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hypertruss.cli", "list"],
                         capture_output=True, text=True, check=True).stdout
    assert "reticular-beam\t14 nodes\t33 members\t30 DoF" in out


def test_single_strategy_is_deterministic(tmp_path):
    args = ["analyze", "--benchmark", "eight-member", "--runs", "4", "--seed", "3"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "results.csv").read_bytes()
    assert a == (tmp_path / "b" / "results.csv").read_bytes()
    rows = read_results_csv(tmp_path / "a" / "results.csv")
    assert len(rows) == 4 and all(r["objective"] <= 1e-5 for r in rows)
    prof = (tmp_path / "a" / "profile.csv").read_text().splitlines()
    assert prof[0] == "generation,mean,std,n"


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HYPERTRUSS_OUT", str(tmp_path / "env"))
    assert main(["analyze", "--benchmark", "two-bar-oracle", "--runs", "2", "--svg"]) == 0
    assert (tmp_path / "env" / "results.csv").exists()
    assert (tmp_path / "env" / "shape_000.svg").exists()
    summary = json.loads((tmp_path / "env" / "summary.json").read_text())
    assert summary["runs"] == 2


def test_informed_strategy_rows(tmp_path):
    assert main(["analyze", "--benchmark", "eight-member", "--strategy", "informed",
                 "--cells", "3", "--runs", "2", "--out", str(tmp_path)]) == 0
    rows = read_results_csv(tmp_path / "results.csv")
    assert [r["sphere_index"] for r in rows] == [0, 0, 1, 1, 2, 2]
    assert all(r["strategy"] == "informed" for r in rows)


def test_hypersphere_rows_flag_centers(tmp_path):
    cfg = {
        "model": "two-bar-oracle", "strategy": "hypersphere", "seed": 1,
        "optimizer": {"population_size": 20, "max_generations": 500},
        "hypersphere": {"trials_per_sphere": 2, "d_max": 30.0},
        "output": {"dir": str(tmp_path), "svg": True},
    }
    out = execute(cfg)
    rows = read_results_csv(tmp_path / "results.csv")
    centers = [r for r in rows if r["is_center"]]
    assert centers[0]["d_mm"] == 0.0 and centers[0]["run_id"] == -1
    ds = [r["d_mm"] for r in centers]
    assert ds == sorted(ds) and ds[-1] >= 30.0
    assert out.summary["termination"] == "d-max reached"
    assert len(list(tmp_path.glob("shape_*.svg"))) == len(centers)


def test_run_subcommand_with_inline_model(tmp_path):
    model = json.loads(SHIPPED.read_text())
    cfg = {"model": model, "strategy": "single", "single": {"runs": 2},
           "domain": {"displacement": [0, 3000], "lambda": [-0.2, 1]}}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    assert main(["run", str(p), "--out", str(tmp_path / "o")]) == 0
    assert len(read_results_csv(tmp_path / "o" / "results.csv")) == 2


def test_config_errors_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"model": "eight-member", "strategy": "single", "colour": 1}')
    assert main(["run", str(bad)]) == EXIT_CONFIG
    assert main(["analyze", "--model", str(tmp_path / "none.json"),
                 "--out", str(tmp_path)]) == EXIT_CONFIG
    file_model = tmp_path / "m.json"
    file_model.write_text(SHIPPED.read_text())
    # a model file needs an explicit domain
    assert main(["analyze", "--model", str(file_model), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_seed_failure_exit_code(tmp_path):
    cfg = {"model": "two-bar-oracle", "strategy": "hypersphere",
           "optimizer": {"population_size": 5, "max_generations": 1, "target_objective": 1e-14},
           "hypersphere": {"trials_per_sphere": 1}}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    assert main(["run", str(p), "--out", str(tmp_path)]) == EXIT_SEED
