import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[1]

# "criterion N: PASS|FAIL ..." lines collected by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def scenario_dir() -> pathlib.Path:
    return ROOT / "scenarios"


@pytest.fixture
def record_criterion():
    def record(number: str, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
