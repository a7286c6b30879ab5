import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

xi2s = st.floats(min_value=1e-4, max_value=0.6)
etas = st.floats(min_value=0.0, max_value=1.0)
positive_etas = st.floats(min_value=0.01, max_value=1.0)
detectors = st.sampled_from(["td", "nrd"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
