import numpy as np
import pytest

from delayhinf.model import section5_system
from delayhinf.synthesis import synthesize


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sys5():
    return section5_system()


@pytest.fixture(scope="session")
def design(sys5):
    """Certified filter at gamma = 0.5, tau_max = 0.5 (shared; ~4 s)."""
    return synthesize(sys5, 0.5)
