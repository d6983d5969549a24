import numpy as np
import pytest

from lazyblas import kernels
from lazyblas.tensor import Tensor


@pytest.fixture(autouse=True)
def clean_state():
    kernels.select_backend("naive")
    kernels.reset_log()
    yield
    kernels.select_backend("naive")
    kernels.reset_log()


def rand_tensor(rng, *extents, dtype=np.float64):
    t = Tensor(len(extents), *extents, dtype=dtype)
    t.column_view()[...] = rng.random(extents).astype(dtype)
    return t


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
