import numpy as np
import pytest

from ductpinn import Architecture, StructuralError, flatten, he_init, unflatten
from ductpinn.network import load_checkpoint, save_checkpoint


@pytest.mark.parametrize("bad", [dict(n_layers=2), dict(hidden_width=0), dict(output_width=3)])
def test_architecture_validation(bad):
    with pytest.raises(StructuralError):
        Architecture(**bad)


def test_parameter_counts():
    assert Architecture(3, 2, 1).n_params == 7
    # 1->90, four 90->90, 90->2
    assert Architecture(7, 90, 2).n_params == 33122
    assert Architecture(7, 90, 2).n_params == (1 * 90 + 90) + 4 * (90 * 90 + 90) + (90 * 2 + 2)


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_he_init_biases_zero_and_deterministic(seed):
    arch = Architecture(5, 7, 2)
    a, b = he_init(arch, seed), he_init(arch, seed)
    assert all(np.all(bias == 0.0) for bias in a.biases)
    assert flatten(a).tobytes() == flatten(b).tobytes()
    assert flatten(he_init(arch, seed + 1)).tobytes() != flatten(a).tobytes()


def test_he_init_variance_fan_in_two():
    # 25000 layers of shape 2x2 -> 1e5 weights with fan_in = 2
    arch = Architecture(25002, 2, 2)
    p = he_init(arch, 7)
    w = np.concatenate([W.ravel() for W in p.weights[1:]])
    assert w.size == 100000
    sigma = np.sqrt(2.0 / 2)
    assert abs(w.mean()) < 3 * sigma / np.sqrt(w.size)
    assert abs(w.var() / (2.0 / 2) - 1.0) < 0.02


def test_he_init_first_layer_uses_fan_in_one():
    arch = Architecture(3, 20000, 1)
    w = he_init(arch, 3).weights[0].ravel()
    assert abs(w.var() / 2.0 - 1.0) < 0.05


def test_flatten_layout_layer_major():
    arch = Architecture(3, 2, 1)
    p = he_init(arch, 0)
    p.biases[0][:] = [10.0, 11.0]
    p.biases[1][:] = [12.0]
    theta = flatten(p)
    np.testing.assert_array_equal(theta[:2], p.weights[0].ravel())
    np.testing.assert_array_equal(theta[2:4], [10.0, 11.0])
    np.testing.assert_array_equal(theta[4:6], p.weights[1].ravel())
    assert theta[6] == 12.0


def test_round_trip_bitwise(rng):
    arch = Architecture(4, 5, 2)
    a = rng.standard_normal(arch.n_params)
    assert flatten(unflatten(arch, a)).tobytes() == a.tobytes()


def test_unflatten_length_mismatch():
    with pytest.raises(StructuralError):
        unflatten(Architecture(3, 2, 1), np.zeros(6))


def test_checkpoint_round_trip(tmp_path):
    p = he_init(Architecture(4, 6, 2), 5)
    path = save_checkpoint(tmp_path / "net.npz", p, seed=5)
    q, header = load_checkpoint(path)
    assert header["seed"] == 5 and header["hidden_width"] == 6
    assert flatten(q).tobytes() == flatten(p).tobytes()
