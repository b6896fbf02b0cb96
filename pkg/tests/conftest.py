import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_image(rng, shape=(8, 8, 3)):
    return rng.random(shape)


@pytest.fixture
def image_8x8x3(rng):
    return random_image(rng)
