"""
Pytest configuration file
"""

import os

import pytest
from dotenv import load_dotenv

from tropigon import gallery


@pytest.fixture(autouse=True)
def load_test_env():
    """Load test environment variables"""
    # Load .env file if it exists
    env_path = os.path.join(os.path.dirname(__file__), "..", ".env")
    load_dotenv(env_path)


@pytest.fixture
def mock_env_vars(monkeypatch):
    """Set up mock environment variables for testing"""
    test_vars = {
        "TROPIGON_STEP_GUARD": "100000",
        "TROPIGON_MAX_GENUS": "6",
        "TROPIGON_JOBS": "1",
        "TROPIGON_LOG_LEVEL": "WARNING",
    }

    for key, value in test_vars.items():
        monkeypatch.setenv(key, value)


@pytest.fixture
def theta():
    return gallery.theta()


@pytest.fixture
def k4():
    return gallery.k4()


@pytest.fixture
def prism():
    return gallery.uneven_prism()


@pytest.fixture
def rung():
    return gallery.rung_graph()


@pytest.fixture
def looped():
    return gallery.looped_theta()
