import os
import sys

import numpy as np
import pytest

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from spaces.measure_space import MeasureSpace
from spaces.norms import SpaceModel
from spaces.young import mixed_power_young, power_young


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def plane():
    return MeasureSpace([1.0, 1.0])


@pytest.fixture
def weighted_space():
    return MeasureSpace([0.5, 1.3, 0.7, 2.0, 1.1])


@pytest.fixture
def models(weighted_space):
    """Hilbert, ℓ³, Orlicz |u|³ and Orlicz u²/2 + u⁴/4 over the same weights"""
    return [
        SpaceModel.hilbert(weighted_space),
        SpaceModel.lebesgue(weighted_space, 3.0),
        SpaceModel.orlicz(weighted_space, power_young(3.0, normalized=False)),
        SpaceModel.orlicz(weighted_space, mixed_power_young(2.0, 4.0)),
    ]
