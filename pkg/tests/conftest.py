import numpy as np
import pytest

from bilasym.config import PairingScheme

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def square_scheme():
    return PairingScheme.from_one_based([(1, 3)], [2, 4])


@pytest.fixture
def X1():
    return np.array([[-1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, -1.0]])


@pytest.fixture
def X2():
    return np.array([[-0.95, 0.36], [-0.28, 2.11], [0.99, 0.54], [-0.31, -1.37]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
