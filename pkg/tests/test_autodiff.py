import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ductpinn import Architecture, InputError, StructuralError, eval_with_input_derivatives
from ductpinn.autodiff import backward, forward
from ductpinn.network import MlpParams, he_init

from conftest import perturbed_params


def test_constant_network():
    arch = Architecture(4, 5, 1)
    p = he_init(arch, 0)
    for W in p.weights:
        W[:] = 0.0
    p.biases[-1][:] = 0.7
    out = eval_with_input_derivatives(p, 0.4)
    assert out.value[0] == 0.7 and out.d1[0] == 0.0 and out.d2[0] == 0.0


def test_linear_regime_is_affine():
    # tiny first-layer weight keeps tanh in its linear range: u ~ 2x + 1
    arch = Architecture(3, 1, 1)
    p = he_init(arch, 0)
    eps = 1e-6
    p.weights[0][:] = eps
    p.biases[0][:] = 0.0
    p.weights[1][:] = 2.0 / eps
    p.biases[1][:] = 1.0
    out = eval_with_input_derivatives(p, 0.3)
    assert out.value[0] == pytest.approx(1.6, rel=1e-9)
    assert out.d1[0] == pytest.approx(2.0, rel=1e-9)
    assert abs(out.d2[0]) < 1e-8


def test_output_affine_in_bias():
    arch = Architecture(4, 6, 2)
    p = perturbed_params(arch, 3)
    for W in p.weights[1:-1]:
        W[:] = 0.0
    base = eval_with_input_derivatives(p, 0.2).value
    p.biases[-1] += np.array([0.5, -1.25])
    np.testing.assert_allclose(eval_with_input_derivatives(p, 0.2).value, base + [0.5, -1.25], rtol=0, atol=1e-15)


def _fd_check(p, x, h=1e-5):
    o = eval_with_input_derivatives(p, x)
    a = eval_with_input_derivatives(p, x + h)
    b = eval_with_input_derivatives(p, x - h)
    d1_fd = (a.value - b.value) / (2 * h)
    d2_fd = (a.d1 - b.d1) / (2 * h)
    return o, d1_fd, d2_fd


def test_seeded_2x8_network_against_central_differences():
    p = perturbed_params(Architecture(4, 8, 1), 11)
    o, d1_fd, d2_fd = _fd_check(p, 0.3)
    np.testing.assert_allclose(o.d1, d1_fd, rtol=1e-5)
    np.testing.assert_allclose(o.d2, d2_fd, rtol=1e-5)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), x=st.floats(-3.0, 3.0), width=st.integers(1, 12),
       depth=st.integers(3, 6), outputs=st.sampled_from([1, 2]))
def test_input_derivatives_property(seed, x, width, depth, outputs):
    p = perturbed_params(Architecture(depth, width, outputs), seed)
    o, d1_fd, d2_fd = _fd_check(p, x)
    scale1 = max(1.0, np.max(np.abs(o.d1)))
    scale2 = max(1.0, np.max(np.abs(o.d2)))
    assert np.max(np.abs(o.d1 - d1_fd)) / scale1 < 1e-5
    assert np.max(np.abs(o.d2 - d2_fd)) / scale2 < 1e-5


def test_batched_forward_matches_pointwise():
    p = perturbed_params(Architecture(5, 7, 2), 2)
    xs = np.linspace(0, 1, 9)
    out = forward(p, xs).out
    for i, x in enumerate(xs):
        o = eval_with_input_derivatives(p, x)
        np.testing.assert_allclose(out[:, i, :], np.stack([o.value, o.d1, o.d2]), rtol=1e-14, atol=1e-14)


def test_backward_against_finite_differences():
    from ductpinn import flatten, unflatten
    arch = Architecture(4, 5, 2)
    p = perturbed_params(arch, 4)
    x = np.linspace(0, 1, 7)
    G = np.random.default_rng(0).standard_normal((3, 7, 2))

    def scalar(theta):
        return float(np.sum(G * forward(unflatten(arch, theta), x).out))

    theta = flatten(p)
    g = backward(forward(p, x), G)
    h = 1e-6
    fd = np.array([(scalar(theta + h * e) - scalar(theta - h * e)) / (2 * h) for e in np.eye(theta.size)])
    assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-7


def test_structural_and_input_errors():
    arch = Architecture(3, 2, 1)
    p = he_init(arch, 0)
    bad = MlpParams.__new__(MlpParams)
    bad.arch, bad.weights, bad.biases = arch, [np.zeros((3, 1)), np.zeros((1, 2))], [np.zeros(2), np.zeros(1)]
    with pytest.raises(StructuralError):
        eval_with_input_derivatives(bad, 0.1)
    p.weights[1][0, 0] = np.nan
    with pytest.raises(InputError):
        eval_with_input_derivatives(p, 0.1)
