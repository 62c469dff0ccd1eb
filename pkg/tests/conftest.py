import numpy as np
import pytest

from paracalc import spectral as sp


@pytest.fixture(scope="session")
def grid12():
    return sp.Grid(12)


@pytest.fixture(scope="session")
def grid10():
    return sp.Grid(10)


@pytest.fixture(scope="session")
def rough_trio(grid12):
    """Standard positive-regularity inputs shared across tests."""
    return (
        sp.synth_holder(0.3, 11, grid12),
        sp.synth_holder(0.4, 22, grid12),
        sp.synth_holder(0.2, 33, grid12),
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
