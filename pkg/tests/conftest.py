import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_intervals(rng, n, p=None, scale=3.0):
    shape = (n,) if p is None else (n, p)
    c = rng.normal(size=shape) * scale
    r = rng.uniform(0.0, 1.0, size=shape)
    return c - r, c + r


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
