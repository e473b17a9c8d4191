import numpy as np
import pytest

from twoshock.gas import GasModel, State
from twoshock.profiles import build_composite
from twoshock.riemann import build_fan
from twoshock.shifts import WeightPair


@pytest.fixture(scope="session")
def sw_gas():
    return GasModel(2.0, 1.0)


@pytest.fixture(scope="session")
def sw_fan(sw_gas):
    return build_fan(State(1.0, 0.0), 0.1, 0.1, sw_gas)


@pytest.fixture(scope="session")
def sw_wave(sw_fan):
    return build_composite(sw_fan)


@pytest.fixture(scope="session")
def sw_weights(sw_fan, sw_wave):
    return WeightPair(0.25, sw_wave, sw_fan)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
