# tests/conftest.py
import numpy as np
import pytest
from loguru import logger


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def quiet_logs():
    # keep library INFO chatter out of test output
    logger.remove()
    yield
