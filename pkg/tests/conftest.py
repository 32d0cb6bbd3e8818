from pathlib import Path

import pytest

from relcalc.structures import Structure, load_structure

DATA = Path(__file__).parent / "data"


@pytest.fixture
def fig1_path() -> Path:
    return DATA / "fig1.json"


@pytest.fixture
def fig1() -> Structure:
    return load_structure(DATA / "fig1.json")


# Lines written by the acceptance gate; echoed after the run so they show up
# without -s.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
