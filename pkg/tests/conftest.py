import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary prints them after the run."""

    def record(label, ok, detail=""):
        ACCEPTANCE.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0][2:])):
        terminalreporter.write_line(f"{label} {'PASS' if ok else 'FAIL'}  {detail}")
