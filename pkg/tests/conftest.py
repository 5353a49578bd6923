import numpy as np
import pytest

from lie4moduli.catalog import ALGEBRA_IDS, default_algebra


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=ALGEBRA_IDS)
def alg(request):
    return default_algebra(request.param)
