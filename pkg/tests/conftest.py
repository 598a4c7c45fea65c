import numpy as np
import pytest

from bkrlab import kernels
from bkrlab.space import Event, SpaceShape


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile (or load cached) numba kernels once so timed tests see steady state
    a = Event(SpaceShape((2, 2)), [1, 0, 1, 1])
    for mod in kernels.available_backends().values():
        t = mod.cylinder_table(a.bits, np.array([2, 2], dtype=np.int64))
        mod.bkr2_tables(t, t)
        mod.bkr_r_tables(np.stack([t, t, t]))
        mod.all_over_axis(a.bits, 1, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def ev(shape, *points):
    """Event from digit strings, e.g. ev((2, 2), "00", "01")."""
    sh = SpaceShape(shape)
    return Event.from_points(sh, [tuple(int(c) for c in p) for p in points])
