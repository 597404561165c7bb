"""Shared pytest plumbing: the acceptance-criteria verdict summary."""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_record():
    """Callable that files one verdict line for the terminal summary."""
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
