import pytest

from hairlab.mapcore import Params


@pytest.fixture(scope="session")
def P3():
    return Params.from_a(3.0)


@pytest.fixture(scope="session")
def params():
    return {a: Params.from_a(a) for a in (3.0, 3.1, 5.0, 10.0)}


_CRITERIA = []


def pytest_runtest_logreport(report):
    if report.when == "call":
        _CRITERIA.extend(l for l in report.capstdout.splitlines() if l.startswith("CRITERION"))


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
