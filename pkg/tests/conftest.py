import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption(
        "--allow-expensive",
        action="store_true",
        default=False,
        help="run the multi-minute exhaustive scans at n = 5",
    )


@pytest.fixture
def allow_expensive(request) -> bool:
    return request.config.getoption("--allow-expensive")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
