"""Command-line entry point: scripted scenarios, the fuzz harness, and the
proof-size benchmark.  Exit code 0 iff all assertions pass."""

from __future__ import annotations

import json
import sys

import click

from .rootchain import ChainParams
from . import bench as bench_mod
from . import scenarios as scn


def _params(maturity, bond, smt_depth, config_file) -> ChainParams:
    values = {}
    if config_file:
        with open(config_file) as fh:
            values.update(json.load(fh))
    if maturity is not None:
        values["maturity_period"] = maturity
    if bond is not None:
        values["bond_amount"] = bond
    if smt_depth is not None:
        values["smt_depth"] = smt_depth
    return ChainParams(**values)


def _write_report(report_json: str, path):
    if path:
        with open(path, "w") as fh:
            fh.write(report_json + "\n")


@click.group()
def main():
    """Deterministic plasma coin-exit simulator."""


@main.command("run")
@click.option("--scenario", "name", required=True, help="scenario name (S1..S5)")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--maturity", type=int, default=None, help="maturity period override")
@click.option("--bond", type=int, default=None, help="bond amount override")
@click.option("--smt-depth", type=int, default=None, help="tree depth override")
@click.option("--config", "config_file", type=click.Path(exists=True), default=None,
              help="JSON file with chain parameters")
@click.option("--watcher/--no-watcher", default=True, show_default=True,
              help="run the defending wallet watcher")
@click.option("--json", "json_path", type=click.Path(), default=None,
              help="write the full report to this path")
def run_cmd(name, seed, maturity, bond, smt_depth, config_file, watcher, json_path):
    """Run one scripted scenario and check its expected outcome."""
    params = _params(maturity, bond, smt_depth, config_file)
    report = scn.run(name, seed=seed, params=params, watcher=watcher)
    _write_report(report.to_json(), json_path)
    click.echo(f"{report.name}: {'PASS' if report.passed else 'FAIL'}")
    for failure in report.failures:
        click.echo(f"  - {failure}")
    sys.exit(0 if report.passed else 1)


@main.command("fuzz")
@click.option("--steps", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--byzantine/--honest", default=False, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
def fuzz_cmd(steps, seed, byzantine, json_path):
    """Randomized interleaving run with invariant checking."""
    report = scn.fuzz(steps, seed=seed, byzantine=byzantine)
    _write_report(report.to_json(), json_path)
    click.echo(f"{report.name}: {'PASS' if report.passed else 'FAIL'} {report.extras}")
    for failure in report.failures:
        click.echo(f"  - {failure}")
    sys.exit(0 if report.passed else 1)


@main.command("bench-proofs")
@click.option("--txs", default=2378, show_default=True, type=int)
@click.option("--depth", default=64, show_default=True, type=int)
@click.option("--trials", default=1000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--json", "json_path", type=click.Path(), default=None)
def bench_cmd(txs, depth, trials, seed, json_path):
    """Measure naive vs compact serialized proof sizes."""
    result = bench_mod.bench_compact_proofs(txs=txs, depth=depth, trials=trials, seed=seed)
    _write_report(json.dumps(result, indent=2), json_path)
    click.echo(
        f"naive proof: {result['naive_size']} bytes; "
        f"mean compact over {trials} proofs: {result['mean_compact']:.1f} bytes "
        f"(min {result['min_compact']}, max {result['max_compact']})"
    )
    sys.exit(0 if result["naive_uniform"] else 1)


if __name__ == "__main__":
    main()
