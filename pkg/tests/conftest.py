import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lipfree.metric import shortest_path_closure, validate_metric

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_metric(rng, n, low=0.2, high=2.0, base=0):
    """Random pointed metric: shortest-path closure of random symmetric weights."""
    W = np.triu(rng.uniform(low, high, size=(n, n)), 1)
    return validate_metric(shortest_path_closure(W + W.T), base)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def path3():
    """Points 0 - 1 - 2 on a line with unit edges."""
    return validate_metric([[0, 1, 2], [1, 0, 1], [2, 1, 0]], 0)


@pytest.fixture
def vee3():
    """Base 0 with a, b at distance 1 each and d(a, b) = 2."""
    return validate_metric([[0, 1, 1], [1, 0, 2], [1, 2, 0]], 0, ["0", "a", "b"])
