"""CLI tests: subcommands, exit codes, machine-readable error records."""

import json
import math

import pytest

from eabf.budget import fm_tolerance
from eabf.cli import main


def test_budget_prints_tolerance(capsys):
    assert main(["budget", "--sigma", "0.0005", "--m", "30"]) == 0
    out = capsys.readouterr().out.strip()
    expected = fm_tolerance(0.0005, 30, 0.05, 0.0, 1 / math.sqrt(2 * math.pi))
    assert float(out) == pytest.approx(expected, rel=1e-12)


def test_budget_with_tail(capsys):
    assert main(["budget", "--sigma", "0.02", "--m", "10", "--tail", "0.01"]) == 0
    out = capsys.readouterr().out.strip()
    assert float(out) == pytest.approx(
        fm_tolerance(0.02, 10, 0.05, 0.01, 1 / math.sqrt(2 * math.pi)), rel=1e-12
    )


def test_infeasible_budget_error_record(capsys):
    code = main(["budget", "--sigma", "1.0", "--m", "10", "--tail", "0.06"])
    captured = capsys.readouterr()
    assert code == 2
    record = json.loads(captured.err)
    assert record["error"] == "InfeasibleBudgetError"
    assert "raise k" in record["message"]


def test_run_wave_writes_report(tmp_path, capsys):
    out = tmp_path / "wave"
    assert main(["run", "wave", "--seed", "7", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["kappa_mode"] == 4
    assert (out / "summary.json").exists()
    on_disk = json.loads((out / "summary.json").read_text())
    assert on_disk["seed"] == 7


def test_run_with_config_file(tmp_path, capsys):
    cfg_path = tmp_path / "wave.json"
    cfg_path.write_text(json.dumps({"experiment": "wave", "seed": 11,
                                    "noise_multiplier": 0.0}))
    out = tmp_path / "run"
    assert main(["run", "wave", "--config", str(cfg_path), "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["seed"] == 11
    assert summary["abf"] < 1e-6


def test_cli_seed_overrides_config(tmp_path, capsys):
    cfg_path = tmp_path / "wave.json"
    cfg_path.write_text(json.dumps({"experiment": "wave", "seed": 11}))
    out = tmp_path / "run"
    assert main(["run", "wave", "--config", str(cfg_path), "--seed", "3",
                 "--out", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 3


def test_bad_config_field_is_reported(tmp_path, capsys):
    cfg_path = tmp_path / "wave.json"
    cfg_path.write_text(json.dumps({"experiment": "wave", "seed": 1, "nope": 5}))
    code = main(["run", "wave", "--config", str(cfg_path), "--out", str(tmp_path / "x")])
    captured = capsys.readouterr()
    assert code == 2
    assert json.loads(captured.err)["error"] == "ConfigError"


def test_rates_subcommand_subset(tmp_path, capsys):
    out = tmp_path / "rates"
    assert main(["rates", "--which", "lemma", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["which"] == ["lemma"]
    assert summary["lemma_all_hold"]
    assert (out / "lemma_checks.csv").exists()
