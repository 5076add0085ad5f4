import numpy as np
import pytest
import torch

from nnem.errors import DimensionMismatchError, InvalidArgumentError
from nnem.localnet import (
    DTYPE,
    LocalNet,
    NetConfig,
    backprop_theta,
    forward_batch,
    forward_with_spatial_grad,
    init_params,
    init_params_batch,
    unpack,
)


def test_default_parameter_count():
    config = NetConfig()
    assert config.layer_shapes == [(2, 16), (16, 16), (16, 1)]
    assert config.n_params == 337


@pytest.mark.parametrize(
    "kwargs",
    [{"hidden_layers": 0}, {"width": 0}, {"activation": "relu"}, {"input_dim": 3}],
)
def test_config_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        NetConfig(**kwargs)


def test_initialization_is_deterministic():
    config = NetConfig(width=8)
    assert torch.equal(init_params(config, 7), init_params(config, 7))
    assert not torch.equal(init_params(config, 7), init_params(config, 8))
    batch = init_params_batch(config, 3, 7)
    assert torch.equal(batch[0], init_params(config, 7))
    for w, b in unpack(config, batch):
        fan_out, fan_in = w.shape[-2:]
        assert torch.all(w.abs() <= (6.0 / (fan_in + fan_out)) ** 0.5)
        assert torch.all(b == 0)


def test_unpack_rejects_wrong_length():
    with pytest.raises(DimensionMismatchError):
        unpack(NetConfig(), torch.zeros(10, dtype=DTYPE))
    with pytest.raises(DimensionMismatchError):
        LocalNet(NetConfig(), torch.zeros(10, dtype=DTYPE))


def test_zero_parameters_give_zero():
    net = LocalNet(NetConfig(), torch.zeros(337, dtype=DTYPE))
    value, grad = forward_with_spatial_grad(net, [[0.3, 0.7], [0.1, 0.2]])
    assert torch.all(value == 0)
    assert torch.all(grad == 0)


def test_single_hidden_unit():
    config = NetConfig(hidden_layers=1, width=1)
    net = LocalNet(config, torch.tensor([1.0, 0.0, 0.0, 1.0, 0.0], dtype=DTYPE))
    x = np.array([[0.3, 0.7], [1.2, -0.4]])
    value, grad = forward_with_spatial_grad(net, x)
    assert value.numpy() == pytest.approx(np.sin(x[:, 0]))
    assert grad.numpy() == pytest.approx(np.column_stack([np.cos(x[:, 0]), np.zeros(2)]))


def test_linearity_of_identity_network():
    config = NetConfig(hidden_layers=1, width=4, activation="identity")
    net = LocalNet.initialized(config, 3)
    a = np.array([0.2, 0.9])
    b = np.array([-0.4, 0.3])
    va, _ = forward_with_spatial_grad(net, a)
    vb, _ = forward_with_spatial_grad(net, b)
    vab, _ = forward_with_spatial_grad(net, a + b)
    v0, _ = forward_with_spatial_grad(net, np.zeros(2))
    assert float(vab) == pytest.approx(float(va + vb - v0), abs=1e-14)


@pytest.mark.parametrize("activation", ["sine", "tanh", "identity"])
def test_spatial_gradient_matches_finite_differences(activation):
    net = LocalNet.initialized(NetConfig(width=8, activation=activation), 1)
    x = torch.tensor([0.31, 0.47], dtype=DTYPE)
    _, grad = forward_with_spatial_grad(net, x)
    step = 1e-6
    for d in range(2):
        e = torch.zeros(2, dtype=DTYPE)
        e[d] = step
        plus, _ = forward_with_spatial_grad(net, x + e)
        minus, _ = forward_with_spatial_grad(net, x - e)
        assert float((plus - minus) / (2 * step)) == pytest.approx(float(grad[d]), rel=1e-6, abs=1e-9)


def test_batch_matches_single_networks():
    config = NetConfig(width=6)
    theta = init_params_batch(config, 3, 11)
    x = torch.rand(3, 5, 2, dtype=DTYPE, generator=torch.Generator().manual_seed(0))
    values, grads = forward_batch(config, theta, x)
    for n in range(3):
        v, g = forward_with_spatial_grad(LocalNet(config, theta[n]), x[n])
        assert torch.allclose(values[n], v, rtol=0, atol=1e-15)
        assert torch.allclose(grads[n], g, rtol=0, atol=1e-15)


def test_zero_output_layer_gradient():
    config = NetConfig(width=5)
    theta = init_params(config, 2)
    tail = config.width + 1
    theta[-tail:] = 0.0
    net = LocalNet(config, theta)
    g = backprop_theta(net, [[0.2, 0.4], [0.6, 0.1]], [1.0, 1.0], np.zeros((2, 2)))
    assert torch.all(g[:-tail] == 0)
    assert torch.any(g[-tail:] != 0)
    assert float(g[-1]) == pytest.approx(2.0)


def test_backprop_matches_finite_differences():
    config = NetConfig(width=6)
    net = LocalNet.initialized(config, 5)
    x = np.array([[0.2, 0.4], [0.7, 0.9], [0.5, 0.1]])
    seed_value = np.array([0.3, -1.2, 0.8])
    seed_grad = np.array([[1.0, 0.5], [-0.2, 0.1], [0.4, -0.7]])

    def functional(theta):
        v, g = forward_with_spatial_grad(LocalNet(config, theta), x)
        return float((v.numpy() * seed_value).sum() + (g.numpy() * seed_grad).sum())

    g = backprop_theta(net, x, seed_value, seed_grad)
    rng = np.random.default_rng(0)
    step = 1e-6
    for j in rng.choice(config.n_params, size=10, replace=False):
        plus = net.theta.clone()
        minus = net.theta.clone()
        plus[j] += step
        minus[j] -= step
        fd = (functional(plus) - functional(minus)) / (2 * step)
        assert fd == pytest.approx(float(g[j]), rel=1e-5, abs=1e-8)


def test_backprop_accumulates_into_buffer():
    net = LocalNet.initialized(NetConfig(width=4), 0)
    x = [[0.5, 0.5]]
    once = backprop_theta(net, x, [1.0], [[0.0, 0.0]])
    out = torch.zeros(net.config.n_params, dtype=DTYPE)
    backprop_theta(net, x, [1.0], [[0.0, 0.0]], out=out)
    backprop_theta(net, x, [1.0], [[0.0, 0.0]], out=out)
    assert torch.allclose(out, 2 * once)
