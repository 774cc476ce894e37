import pytest

from fieldalg.field_algebra import free_boson_algebra, holomorphic, matrix_algebra

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def boson():
    return free_boson_algebra()


@pytest.fixture(scope="session")
def matrices():
    return holomorphic(matrix_algebra())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
