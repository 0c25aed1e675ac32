import math

import numpy as np
import pytest
from hypothesis import strategies as st

from hermit.bloch import Axis


def haar_unitary(n, rng):
    """Haar-random n x n unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_axis(rng):
    v = rng.standard_normal(3)
    return Axis.of(v / np.linalg.norm(v))


def max_diff(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# hypothesis strategies
seeds = st.integers(min_value=0, max_value=2**32 - 1)
angles = st.floats(min_value=-4 * math.pi, max_value=4 * math.pi, allow_nan=False)


@st.composite
def axes(draw):
    theta = draw(st.floats(min_value=0, max_value=math.pi))
    phi = draw(st.floats(min_value=0, max_value=2 * math.pi))
    return Axis.from_angles(theta, phi)


@st.composite
def unitaries2(draw):
    return haar_unitary(2, np.random.default_rng(draw(seeds)))
