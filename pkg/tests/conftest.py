import pytest

from nwspec import GridSpec

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
