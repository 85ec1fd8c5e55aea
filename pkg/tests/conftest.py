"""Shared fixtures and the acceptance summary printed after the run."""

import pytest

ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def acceptance_record(request):
    """Store one summary line per criterion, keyed by its number."""
    store = request.config.stash[ACCEPTANCE]

    def record(number: int, line: str) -> None:
        store[number] = line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        terminalreporter.write_line(store[number])
