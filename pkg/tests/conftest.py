import zlib

import numpy as np
import pytest

from hawkes_exact import Exponential, HawkesParams, QueueModel
from hawkes_exact.rng import make_stream


@pytest.fixture
def base_model():
    """Reference Hawkes model (1, 0.5, Exp(2)) with stationary rate 2."""
    return HawkesParams(1.0, 0.5, Exponential(2.0))


@pytest.fixture
def base_queue(base_model):
    return QueueModel(base_model, Exponential(3.0))


@pytest.fixture
def mm1_queue():
    return QueueModel(HawkesParams(1.0, 1e-6, Exponential(2.0)), Exponential(3.0))


@pytest.fixture
def rng(request):
    # one stream per test, keyed by a stable hash of the test id
    key = zlib.crc32(request.node.nodeid.encode())
    return make_stream(1234, key)


def zscore(sample_mean, target, stderr):
    return (sample_mean - target) / stderr


def within_se(values, target, k=3.0):
    v = np.asarray(values, dtype=float)
    se = v.std(ddof=1) / np.sqrt(v.size)
    return abs(v.mean() - target) <= k * se, v.mean(), se
