import numpy as np
import pytest

from pointspectra import PointPattern, Window


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_pattern(rng, dim=2, n=50, side=10.0, sides=None):
    window = Window(tuple(sides)) if sides is not None else Window.cube(side, dim)
    pts = (rng.random((n, dim)) - 0.5) * window.sides
    return PointPattern(window, pts)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
