import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

from syzlab import fixtures  # noqa: E402


@pytest.fixture(scope="session")
def trigen():
    return fixtures.ring("x3_x2y_y2")


@pytest.fixture(scope="session")
def cube():
    return fixtures.ring("m3_xy")


@pytest.fixture(scope="session")
def fib():
    return fixtures.ring("fiber_xy_zw")


@pytest.fixture(scope="session")
def x2():
    return fixtures.ring("x2")


@pytest.fixture(scope="session")
def x3():
    return fixtures.ring("x3")


@pytest.fixture(scope="session")
def x2y2():
    return fixtures.ring("x2_y2")
