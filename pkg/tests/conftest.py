import sys

import pytest

from permstat.guess import LastEntryMoments, SnMoments


@pytest.fixture(scope="session")
def sn_moments():
    return SnMoments(4)


@pytest.fixture(scope="session")
def last_moments():
    return LastEntryMoments(3)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance"):
            lines += getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(set(lines), key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
