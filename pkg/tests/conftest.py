import numpy as np
import pytest

from fermigas.fermi_surface import MomentumSet
from fermigas.ggr import GProfile
from fermigas.slater import DiscreteTorus, OneBodyKernel


def gaussian_g(depth=0.9, width=0.12):
    return lambda r: -depth * np.exp(-(np.asarray(r) / width) ** 2)


@pytest.fixture
def torus_1d():
    return DiscreteTorus(1, 1.0, 16)


@pytest.fixture
def kernel3(torus_1d):
    ms = MomentumSet.from_points([[-1], [0], [1]], L=1.0)
    return OneBodyKernel(ms)


@pytest.fixture
def kernel4():
    ms = MomentumSet.from_points([[-1], [0], [1], [2]], L=1.0)
    return OneBodyKernel(ms)


@pytest.fixture
def gprofile(torus_1d):
    return GProfile(torus_1d, g=gaussian_g())


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
