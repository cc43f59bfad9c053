import numpy as np
import pytest

from doublewell_trap import FIG2_GEOMETRY, FIG2_VOLTAGES, quartic_spectrum


@pytest.fixture
def geom():
    return FIG2_GEOMETRY


@pytest.fixture
def volt():
    return FIG2_VOLTAGES


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def flagship_spectrum():
    return quartic_spectrum(157.4, k=4)
