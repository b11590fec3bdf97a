import numpy as np
import pytest

from zenolab import config as tolconfig


@pytest.fixture(autouse=True)
def _default_tolerances():
    """Isolate tests from any tolerance profile left active by another test."""
    tolconfig.set_tolerances(tolconfig.DEFAULT)
    yield
    tolconfig.set_tolerances(tolconfig.DEFAULT)


@pytest.fixture
def sx():
    return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


@pytest.fixture
def sz():
    return np.diag([1.0, -1.0]).astype(complex)
