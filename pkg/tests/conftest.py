import math

import pytest
from hypothesis import strategies as st

from schwarz_lab.diskmap import DiskSelfMap, TWO_PI

CAP = 0.95


@st.composite
def disk_zeros(draw, cap=CAP, max_size=7):
    n = draw(st.integers(0, max_size))
    out = []
    for _ in range(n):
        r = draw(st.floats(0.0, cap))
        t = draw(st.floats(0.0, TWO_PI, exclude_max=True))
        out.append((complex(r * math.cos(t), r * math.sin(t)), 1))
    return out


@st.composite
def origin_maps(draw, min_k=1, max_k=3):
    """Pure Blaschke products with a zero of multiplicity k at the origin."""
    k = draw(st.integers(min_k, max_k))
    zeros = draw(disk_zeros())
    if k:
        zeros = [(0j, k)] + zeros
    elif not zeros:
        zeros = [(0.5 + 0j, 1)]
    phase = draw(st.floats(0.0, TWO_PI))
    return DiskSelfMap(tuple(zeros), phase)


@st.composite
def shifted_maps(draw):
    zeros = draw(disk_zeros(max_size=5))
    if draw(st.booleans()) or not zeros:
        zeros = [(0j, 1)] + zeros
    phase = draw(st.floats(0.0, TWO_PI))
    r = draw(st.floats(0.0, 0.8))
    t = draw(st.floats(0.0, TWO_PI))
    return DiskSelfMap(tuple(zeros), phase, complex(r * math.cos(t), r * math.sin(t)))


angles = st.floats(0.0, TWO_PI, exclude_max=True)


@pytest.fixture
def z_squared():
    return DiskSelfMap.power(2)


@pytest.fixture
def identity():
    return DiskSelfMap.rotation_map(0.0)
