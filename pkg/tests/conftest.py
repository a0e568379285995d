"""Shared pytest hooks.

Acceptance tests register their PASS/FAIL verdict lines here; the terminal
summary hook replays them after the run, outside pytest's output capture,
so every verdict is visible in the run log.
"""

from typing import List

acceptance_lines: List[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
