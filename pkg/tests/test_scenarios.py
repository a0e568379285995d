"""Scripted scenarios, determinism, and small fuzz smoke runs."""

import json

import pytest

from plasma_cash.errors import UnknownScenario
from plasma_cash.scenarios import SCENARIOS, fuzz, run


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_passes(name):
    report = run(name)
    assert report.passed, report.failures


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_passes_without_watcher(name):
    # attack-success variants: the protocol outcome flips but the scripted
    # expectations for that variant still hold
    report = run(name, watcher=False)
    assert report.passed, report.failures


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_trace_is_deterministic(name):
    a, b = run(name), run(name)
    assert a.event_trace == b.event_trace
    assert a.bond_ledger == b.bond_ledger


def test_unknown_scenario_rejected():
    with pytest.raises(UnknownScenario):
        run("S9")


def test_report_serializes():
    report = run("S1")
    obj = json.loads(report.to_json())
    assert obj["name"] == "S1" and obj["passed"] is True


def test_s2_attack_steals_without_watcher():
    honest = run("S2")
    exposed = run("S2", watcher=False)
    assert "ExitCancelled" in [e["kind"] for e in honest.event_trace]
    assert "Withdrawn" in [e["kind"] for e in exposed.event_trace]


def test_fuzz_smoke_honest():
    report = fuzz(300, seed=5)
    assert report.passed, report.failures


def test_fuzz_smoke_byzantine():
    report = fuzz(300, seed=5, byzantine=True)
    assert report.passed, report.failures


def test_fuzz_deterministic_per_seed():
    a = fuzz(200, seed=11, byzantine=True)
    b = fuzz(200, seed=11, byzantine=True)
    assert a.event_trace == b.event_trace
    assert a.extras == b.extras


def test_fuzz_seeds_differ():
    a = fuzz(200, seed=1)
    b = fuzz(200, seed=2)
    assert a.event_trace != b.event_trace
