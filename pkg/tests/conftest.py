import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def vectors(n=None, lo=1e-3, hi=1e3, zeros=False):
    """Strategy for cone points with log-spread magnitudes."""
    dim = st.integers(1, 6) if n is None else st.just(n)
    coord = st.floats(np.log(lo), np.log(hi)).map(np.exp)
    if zeros:
        coord = st.one_of(coord, st.just(0.0))
    return dim.flatmap(lambda d: st.lists(coord, min_size=d, max_size=d).map(np.array))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
