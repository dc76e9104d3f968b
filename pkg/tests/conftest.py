import pytest
from hypothesis import HealthCheck, settings

from weakbs.grid import build_polar
from weakbs.potential import builtin

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def disk():
    return builtin("disk")


@pytest.fixture(scope="session")
def gaussian():
    return builtin("gaussian")


@pytest.fixture(scope="session")
def small_disk_grid():
    return build_polar(1.0, 12, 24, breaks=(1.0,))


@pytest.fixture(scope="session")
def disk_grid():
    return build_polar(1.0, 24, 48, breaks=(1.0,))
