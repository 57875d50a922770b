import numpy as np
import pytest

from anisodiff import TensorField


def make_random_field(rng: np.random.Generator, shape: tuple[int, int]) -> TensorField:
    """Random positive semidefinite tensor field with eigenvalues in [0, 1]."""
    l1 = rng.uniform(0.0, 1.0, shape)
    l2 = rng.uniform(0.0, 1.0, shape)
    l1, l2 = np.maximum(l1, l2), np.minimum(l1, l2)
    theta = rng.uniform(0.0, np.pi, shape)
    c, s = np.cos(theta), np.sin(theta)
    return TensorField(
        l1 * c * c + l2 * s * s,
        (l1 - l2) * c * s,
        l1 * s * s + l2 * c * c,
    )


@pytest.fixture
def random_field():
    return make_random_field
