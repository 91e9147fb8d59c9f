"""
Shared fixtures for the oscillator tests
"""

import numpy as np
import pytest
import structlog

from common.config import get_settings
from oscillator.deformation import derive, make_params


def derived(alpha: float, beta: float):
    return derive(make_params(alpha, beta))


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Settings are cached; drop the cache so environment tweaks apply per test"""
    for key in ("QOSC_DIM_CAP", "QOSC_SIGMA_CAP", "QOSC_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def general_dp():
    return derived(0.1, 0.2)


@pytest.fixture
def mirrored_dp():
    return derived(0.2, 0.1)


@pytest.fixture
def equal_dp():
    return derived(0.2, 0.2)


@pytest.fixture
def undeformed_dp():
    return derived(0.0, 0.0)


@pytest.fixture
def alpha_zero_dp():
    return derived(0.0, 0.3)


@pytest.fixture
def beta_zero_dp():
    return derived(0.3, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(autouse=True)
def reset_logging():
    """The CLI configures structlog against the current stderr; undo it after each test"""
    yield
    structlog.reset_defaults()
