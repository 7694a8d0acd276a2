import functools

import numpy as np
import pytest

from bethecorr.bethe import ModelParams, string_ground_state


@functools.lru_cache(maxsize=None)
def ground_state(kappa, L, N):
    return string_ground_state(ModelParams(kappa, L, N))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale
