import numpy as np
import pytest

from windline.integrate import QuadratureConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def cfg():
    return QuadratureConfig()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
