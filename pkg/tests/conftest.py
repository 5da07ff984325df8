import numpy as np
import pytest
from hypothesis import settings

from thinfilm.spectral import CosineField, GridSpec

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid16():
    return GridSpec(16)


@pytest.fixture(scope="session")
def grid128():
    return GridSpec(128)


class ConstantMobility:
    """Stand-in model with f_eps identically a0 (eps = M = a0 is not a valid MobilityModel)."""

    def __init__(self, a0, cap_M=None):
        self.a0 = a0
        self.cap_M = a0 if cap_M is None else cap_M
        self.eps = a0

    def f_eps(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.a0)

    def G_eps(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))


def mode_field(grid, *pairs, level=0.0):
    c = np.zeros(grid.n_modes + 1)
    c[0] = level
    for k, a in pairs:
        c[k] += a
    return CosineField(c, grid)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
