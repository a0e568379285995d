"""Command-line entry points."""

import json

from click.testing import CliRunner

from plasma_cash.cli import main


def test_run_scenario():
    result = CliRunner().invoke(main, ["run", "--scenario", "S1"])
    assert result.exit_code == 0, result.output
    assert "S1" in result.output


def test_run_unknown_scenario_fails():
    result = CliRunner().invoke(main, ["run", "--scenario", "S9"])
    assert result.exit_code != 0


def test_run_json_report(tmp_path):
    path = tmp_path / "report.json"
    result = CliRunner().invoke(
        main, ["run", "--scenario", "S2", "--maturity", "5", "--json", str(path)]
    )
    assert result.exit_code == 0, result.output
    obj = json.loads(path.read_text())
    assert obj["name"] == "S2" and obj["passed"] is True


def test_fuzz_command():
    result = CliRunner().invoke(main, ["fuzz", "--steps", "100", "--seed", "3", "--byzantine"])
    assert result.exit_code == 0, result.output


def test_bench_command(tmp_path):
    path = tmp_path / "bench.json"
    result = CliRunner().invoke(
        main,
        ["bench-proofs", "--txs", "50", "--depth", "16", "--trials", "20", "--json", str(path)],
    )
    assert result.exit_code == 0, result.output
    obj = json.loads(path.read_text())
    assert obj["naive_size"] == 16 * 32
