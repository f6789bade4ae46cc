import numpy as np
import pytest

from magnetik import geometries as geo

ACCEPTANCE = []


def record(number, description, passed, detail=""):
    ACCEPTANCE.append((number, description, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed, detail in sorted(ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {description} {detail}".rstrip())


@pytest.fixture(scope="session")
def s3():
    return geo.s3_system("i")


@pytest.fixture(scope="session")
def s3_plain():
    return geo.s3_system(None)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
