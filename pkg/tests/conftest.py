import pytest

from linkrate import LinkParams


@pytest.fixture
def p31():
    return LinkParams(0.3, 0.1)


@pytest.fixture
def p55():
    return LinkParams(0.5, 0.5)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import VERDICTS

    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
