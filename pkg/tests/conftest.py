import numpy as np
import pytest

HAWK_DOVE = np.array([[-1.0, 2.0], [0.0, 1.0]])
PRISONERS = np.array([[3.0, 0.0], [5.0, 1.0]])
RPS = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
PENNIES = np.array([[1.0, -1.0], [-1.0, 1.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_interior(rng, n):
    return rng.dirichlet(np.ones(n))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
