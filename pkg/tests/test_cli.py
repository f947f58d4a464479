import json
import subprocess
import sys
from pathlib import Path

import pytest

from statichedge import portfolio_from_csv
from statichedge.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _write_config(tmp_path, data):
    path = tmp_path / "exp.cfg"
    path.write_text(json.dumps(data))
    return path


def _small_sim_config():
    return {
        "model": {"type": "bs", "r": 0.06, "delta_yield": 0.0, "sigma": 0.27, "mu": 0.1},
        "target": {"strike": 100.0, "maturity": 1.0, "spot": 100.0},
        "methods": [{"name": "DH"}, {"name": "GQ1", "n": 8}],
        "bands": [{"maturity": 40 / 252, "lo": 80.0, "hi": 120.0}],
        "sweep": {"variable": "quad_points", "values": [8]},
        "simulation": {"n_paths": 32, "seed": 5, "step": 1 / 252,
                       "horizon": 21 / 252, "checkpoints": [21 / 252]},
    }


def test_price_subcommand(capsys):
    code = main(["price", "--config", str(CONFIG_DIR / "table1.cfg")])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("target_price=13.59262773")


def test_build_subcommand_writes_portfolios(tmp_path, capsys):
    code = main(["build", "--config", str(CONFIG_DIR / "table2.cfg"),
                 "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "[GQ2] legs=8" in out
    loaded = portfolio_from_csv(tmp_path / "portfolio_GQ2.csv")
    assert loaded.method_tag == "GQ2"
    assert len(loaded.legs) == 8


def test_sweep_subcommand_csv(tmp_path, capsys):
    code = main(["sweep", "--config", str(CONFIG_DIR / "table1.cfg"),
                 "--out", str(tmp_path), "--format", "csv"])
    assert code == 0
    report = (tmp_path / "report.csv").read_text().strip().splitlines()
    assert len(report) == 7


def test_sweep_thread_count_does_not_change_bytes(tmp_path):
    out1, out4 = tmp_path / "t1", tmp_path / "t4"
    assert main(["sweep", "--config", str(CONFIG_DIR / "table2.cfg"),
                 "--out", str(out1), "--format", "json", "--threads", "1"]) == 0
    assert main(["sweep", "--config", str(CONFIG_DIR / "table2.cfg"),
                 "--out", str(out4), "--format", "json", "--threads", "4"]) == 0
    assert (out1 / "report.json").read_bytes() == (out4 / "report.json").read_bytes()


def test_simulate_subcommand(tmp_path, capsys):
    cfg = _write_config(tmp_path, _small_sim_config())
    code = main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o"),
                 "--errors"])
    assert code == 0
    names = {p.name for p in (tmp_path / "o").iterdir()}
    assert {"report.csv", "stats.csv", "errors_DH.csv", "errors_GQ1.csv"} <= names


def test_simulate_requires_simulation_block(tmp_path, capsys):
    code = main(["simulate", "--config", str(CONFIG_DIR / "table1.cfg"),
                 "--out", str(tmp_path)])
    assert code == 2


def test_simulate_seed_override_changes_output(tmp_path):
    cfg = _write_config(tmp_path, _small_sim_config())
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["simulate", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(b),
                 "--seed", "99"]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(c)]) == 0
    assert (a / "stats.csv").read_bytes() == (c / "stats.csv").read_bytes()
    assert (a / "stats.csv").read_bytes() != (b / "stats.csv").read_bytes()


def test_pfe_subcommand(tmp_path):
    cfg = _write_config(tmp_path, _small_sim_config())
    code = main(["pfe", "--config", str(cfg), "--out", str(tmp_path / "pfe")])
    assert code == 0
    lines = (tmp_path / "pfe" / "pfe.csv").read_text().strip().splitlines()
    assert lines[0] == "time,DH_p95,DH_p5,GQ1_p95,GQ1_p5"
    assert len(lines) == 23
    first = [float(v) for v in lines[1].split(",")]
    assert all(abs(v) < 1e-12 for v in first[1:])


def test_exit_code_for_config_error(tmp_path, capsys):
    missing = tmp_path / "missing.cfg"
    assert main(["sweep", "--config", str(missing), "--out", str(tmp_path)]) == 2
    bad = _write_config(tmp_path, {"model": {"type": "bs"}})
    assert main(["sweep", "--config", str(bad), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "config error" in err


def test_exit_code_for_numerical_failure(tmp_path, capsys):
    data = {
        "model": {"type": "bs", "r": 0.06, "delta_yield": 0.0, "sigma": 0.27, "mu": 0.1},
        "target": {"strike": 100.0, "maturity": 1.0, "spot": 100.0},
        "methods": [{"name": "GQ2", "n": 4}],
        "bands": [{"maturity": 0.1587, "lo": 80.0, "hi": 120.0},
                  {"maturity": 0.0833, "lo": 60.0, "hi": 120.0}],
        "sweep": {"variable": "u2", "values": [0.1587 - 5e-5]},
    }
    cfg = _write_config(tmp_path, data)
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "statichedge", "price",
         "--config", str(CONFIG_DIR / "table6.cfg")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("target_price=11.98825250")
