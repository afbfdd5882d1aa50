import numpy as np
import pytest

from ductpinn import Architecture, DuctProblem, flatten, he_init, unflatten


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def perturbed_params(arch, seed, scale=0.3):
    """He-initialized network with non-zero biases, so every code path is exercised."""
    p = he_init(arch, seed)
    theta = flatten(p)
    theta = theta + scale * np.random.default_rng(seed + 1000).standard_normal(theta.size)
    return unflatten(arch, theta)


@pytest.fixture
def reference_problem():
    return DuctProblem(f=500.0, M=0.0)
