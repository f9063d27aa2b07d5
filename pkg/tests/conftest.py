import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "splitgeom", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("splitgeom")

coord = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
quat = st.tuples(coord, coord, coord, coord).map(np.array)
imag = st.tuples(coord, coord, coord).map(np.array)
seeds = st.integers(min_value=0, max_value=2**31 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
