import pytest

import report
from tiny import one_customer, two_same_release


def pytest_terminal_summary(terminalreporter):
    if not report.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in report.RESULTS:
        terminalreporter.write_line(report.line(name, ok, detail))


@pytest.fixture
def tiny1():
    return one_customer()


@pytest.fixture
def tiny2():
    return two_same_release()
