import pytest

from qpmlab.dispersion import load_crystal

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ktp():
    return load_crystal("ktp.json")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
