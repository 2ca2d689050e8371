import numpy as np
import pytest

from sbefs.data import Dataset


@pytest.fixture
def tiny():
    samples = np.array(
        [[1.0, 10.0, 0.0, 5.0],
         [3.0, 20.0, 0.0, 5.0],
         [2.0, 30.0, 4.0, 5.0],
         [4.0, 40.0, 4.0, 5.0]]
    )
    return Dataset(samples, [0, 0, 1, 1])


def planted(n_per_class=60, n_noise=1, shift=3.0, seed=0):
    """One strongly predictive column (id 0) followed by pure noise columns."""
    rng = np.random.default_rng(seed)
    labels = np.repeat([0, 1], n_per_class)
    x = rng.standard_normal((2 * n_per_class, 1 + n_noise))
    x[:, 0] += shift * labels
    return Dataset(x, labels)
