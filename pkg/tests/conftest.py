from __future__ import annotations

from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
GOLDENS = Path(__file__).resolve().parent / "goldens"
COOKBOOK = REPO / "cookbook"

# Filled by test_acceptance.py; printed after the run so that every
# acceptance criterion shows exactly one PASS/FAIL line.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def cookbook() -> Path:
    return COOKBOOK


@pytest.fixture
def goldens() -> Path:
    return GOLDENS


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail and not ok:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
