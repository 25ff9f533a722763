"""Command-line behavior: formats, determinism, exit codes, figures."""

import json

import pytest

import ldpfed.service
from ldpfed.cli import main

SIM = ["simulate", "--model", "linear", "--mechanism", "none",
       "--users", "30", "--epochs", "2", "--seed", "42"]


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_simulate_json_to_stdout(capsys):
    code, out, _ = run(capsys, SIM)
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["model"] == "linear"
    assert doc["config"]["seed"] == 42
    assert doc["average_exp_hamming"] >= 0.99
    assert len(doc["epochs_summary"]) == 2


def test_simulate_csv_to_stdout(capsys):
    code, out, _ = run(capsys, SIM + ["--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("model,mechanism,epsilon")


def test_repeat_runs_are_byte_identical(capsys):
    _, first, _ = run(capsys, SIM + ["--epochs", "3"])
    _, second, _ = run(capsys, SIM + ["--epochs", "3"])
    assert first == second


def test_out_file_and_figures(tmp_path, capsys):
    out = tmp_path / "run.json"
    code, stdout, stderr = run(capsys, SIM + ["--out", str(out)])
    assert code == 0
    assert stdout == ""
    report = json.loads(out.read_text())
    assert report["config"]["users"] == 30
    # figures render next to the report by default when writing to a file
    assert (tmp_path / "run.cost.png").exists()
    assert (tmp_path / "run.recovery.png").exists()
    assert "figure written" in stderr


def test_no_figures_flag(tmp_path, capsys):
    out = tmp_path / "plain.json"
    code, _, _ = run(capsys, SIM + ["--out", str(out), "--no-figures"])
    assert code == 0
    assert out.exists()
    assert list(tmp_path.glob("*.png")) == []


def test_figures_require_out(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(SIM + ["--figures"])
    assert exc_info.value.code == 1
    assert "--figures requires --out" in capsys.readouterr().err


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, [
        "sweep", "--model", "linear", "--mechanism", "duchi",
        "--epsilons", "0.5,2", "--seeds", "2", "--users", "10",
    ])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "epsilon,seed,final_cost,final_accuracy,avg_exp_hamming"
    assert len(lines) == 5


def test_sweep_single_cell_matches_simulate(capsys):
    _, sweep_out, _ = run(capsys, [
        "sweep", "--model", "logistic", "--mechanism", "piecewise",
        "--epsilons", "2", "--seeds", "1", "--users", "15",
    ])
    _, sim_out, _ = run(capsys, [
        "simulate", "--model", "logistic", "--mechanism", "piecewise",
        "--epsilon", "2", "--users", "15", "--seed", "0",
    ])
    row = sweep_out.strip().splitlines()[1].split(",")
    doc = json.loads(sim_out)
    assert float(row[2]) == doc["final_cost"]
    assert float(row[3]) == doc["final_accuracy"]
    assert float(row[4]) == doc["average_exp_hamming"]


def test_sweep_figures(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, [
        "sweep", "--model", "linear", "--mechanism", "laplace",
        "--epsilons", "1,4", "--seeds", "2", "--users", "10",
        "--out", str(out),
    ])
    assert code == 0
    assert (tmp_path / "sweep.tradeoff.png").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--model", "linear"],  # --mechanism is required
        ["simulate", "--model", "linear", "--mechanism", "duchi"],
        ["simulate", "--model", "cnn", "--mechanism", "none"],
        SIM + ["--users", "0"],
        SIM + ["--epochs", "-3"],
        SIM + ["--seed", "-1"],
        SIM + ["--k", "0"],
        SIM + ["--learning-rate", "0"],
        ["simulate", "--model", "linear", "--mechanism", "laplace",
         "--epsilon", "-2"],
        ["sweep", "--model", "linear", "--mechanism", "none",
         "--epsilons", "1"],
        ["sweep", "--model", "linear", "--mechanism", "duchi",
         "--epsilons", "abc"],
        ["sweep", "--model", "linear", "--mechanism", "duchi",
         "--epsilons", "1,-2"],
        ["sweep", "--model", "linear", "--mechanism", "duchi",
         "--epsilons", "1", "--seeds", "0"],
        [],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc_info:
        main(argv)
    # argparse raises SystemExit from parser.error/exit paths
    assert exc_info.value.code == 1
    assert capsys.readouterr().err != ""


def test_runtime_errors_exit_2(tmp_path, capsys):
    missing_dir = tmp_path / "not" / "there" / "run.json"
    code, _, err = run(capsys, SIM + ["--out", str(missing_dir), "--no-figures"])
    assert code == 2
    assert "ldpfed:" in err


def test_port_env_overrides_flag(monkeypatch):
    seen = {}
    monkeypatch.setattr(ldpfed.service, "serve", lambda **kw: seen.update(kw))
    monkeypatch.setenv("PORT", "5555")
    assert main(["serve", "--port", "1234"]) == 0
    assert seen["port"] == 5555
    monkeypatch.delenv("PORT")
    assert main(["serve", "--port", "1234"]) == 0
    assert seen["port"] == 1234
