from __future__ import annotations

from pathlib import Path

import pytest

from fiesolve import Interval, builtin_example

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

# one "PASS/FAIL" line per acceptance criterion, printed at session end
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def unit():
    return Interval(0.0, 1.0)


@pytest.fixture
def ref():
    return Interval(-1.0, 1.0)


@pytest.fixture(scope="session")
def example1():
    return builtin_example(1)


@pytest.fixture(scope="session")
def example2():
    return builtin_example(2)


@pytest.fixture
def problems_dir():
    return PROBLEMS


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
