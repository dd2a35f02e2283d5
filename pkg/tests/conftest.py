import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures" / "reference_values.json"

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ref():
    return json.loads(FIXTURES.read_text())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
