import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def complex_in_disk(radius=0.9):
    return st.builds(lambda r, t: r * np.exp(1j * t),
                     st.floats(0, radius), st.floats(0, 2 * np.pi))


def nonzero_complex():
    return st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.1, 3.0), st.floats(0, 2 * np.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
