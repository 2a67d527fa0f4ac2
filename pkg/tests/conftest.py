import numpy as np
import pytest

import openbook  # noqa: F401  enables float64 before any jax array is built
from openbook.params import BrieskornParams
from openbook.profile import TwistProfile


@pytest.fixture
def profile():
    return TwistProfile(2)


@pytest.fixture
def params():
    return BrieskornParams(3, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
