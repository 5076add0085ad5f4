"""
Small fully connected networks net(x; theta) attached to the envelope functions.

theta is flat: layer by layer, the weight matrix (row-major, out x in) followed by
the bias. Spatial gradients are propagated forward as (value, d/dx, d/dy) through
every layer; parameter gradients come from reverse mode over that forward pass.
All evaluation accepts a leading batch of independent networks so one call
evaluates every local net of a space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable

import torch

from ..errors import DimensionMismatchError, InvalidArgumentError

logger = logging.getLogger(__name__)

DTYPE = torch.float64

Activation = tuple[Callable[[torch.Tensor], torch.Tensor], Callable[[torch.Tensor], torch.Tensor]]

ACTIVATIONS: dict[str, Activation] = {
    "sine": (torch.sin, torch.cos),
    "tanh": (torch.tanh, lambda z: 1.0 - torch.tanh(z) ** 2),
    "identity": (lambda z: z, torch.ones_like),
}


@dataclass(frozen=True)
class NetConfig:
    hidden_layers: int = 2
    width: int = 16
    activation: str = "sine"
    input_dim: int = 2
    output_dim: int = 1

    def __post_init__(self) -> None:
        if self.hidden_layers < 1:
            raise InvalidArgumentError(f"hidden_layers must be >= 1, got {self.hidden_layers}")
        if self.width < 1:
            raise InvalidArgumentError(f"width must be >= 1, got {self.width}")
        if self.activation not in ACTIVATIONS:
            raise InvalidArgumentError(
                f"activation must be one of {sorted(ACTIVATIONS)}, got {self.activation!r}"
            )
        if self.input_dim != 2 or self.output_dim != 1:
            raise InvalidArgumentError("local networks map R^2 to R")

    @property
    def layer_shapes(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) per layer."""
        dims = [self.input_dim] + [self.width] * self.hidden_layers + [self.output_dim]
        return list(zip(dims[:-1], dims[1:]))

    @property
    def n_params(self) -> int:
        return sum(i * o + o for i, o in self.layer_shapes)


def unpack(config: NetConfig, theta: torch.Tensor) -> list[tuple[torch.Tensor, torch.Tensor]]:
    """Views (W (..., out, in), b (..., out)) into theta of shape (..., n_params)."""
    if theta.shape[-1] != config.n_params:
        raise DimensionMismatchError(
            f"theta has {theta.shape[-1]} entries, network needs {config.n_params}"
        )
    lead = theta.shape[:-1]
    layers = []
    pos = 0
    for fan_in, fan_out in config.layer_shapes:
        w = theta[..., pos : pos + fan_in * fan_out].reshape(lead + (fan_out, fan_in))
        pos += fan_in * fan_out
        b = theta[..., pos : pos + fan_out]
        pos += fan_out
        layers.append((w, b))
    return layers


def init_params_batch(config: NetConfig, count: int, seed: int) -> torch.Tensor:
    """
    count independent parameter vectors, shape (count, n_params): weights uniform on
    +-sqrt(6 / (fan_in + fan_out)), biases zero. Drawn in order, so deterministic in seed.
    """
    gen = torch.Generator().manual_seed(int(seed))
    theta = torch.zeros((count, config.n_params), dtype=DTYPE)
    for n in range(count):
        pos = 0
        for fan_in, fan_out in config.layer_shapes:
            bound = (6.0 / (fan_in + fan_out)) ** 0.5
            size = fan_in * fan_out
            theta[n, pos : pos + size] = (
                torch.rand(size, generator=gen, dtype=DTYPE) * 2.0 - 1.0
            ) * bound
            pos += size + fan_out
    return theta


def init_params(config: NetConfig, seed: int) -> torch.Tensor:
    return init_params_batch(config, 1, seed)[0]


def forward_batch(
    config: NetConfig, theta: torch.Tensor, x: torch.Tensor
) -> tuple[torch.Tensor, torch.Tensor]:
    """
    Evaluate B networks at their own points.
    theta (B, n_params), x (B, Q, 2) -> value (B, Q), spatial gradient (B, Q, 2).
    """
    act, dact = ACTIVATIONS[config.activation]
    layers = unpack(config, theta)
    h = x
    dh = torch.eye(2, dtype=x.dtype).expand(x.shape[:-1] + (2, 2))
    for w, b in layers[:-1]:
        z = torch.einsum("boi,bqi->bqo", w, h) + b[:, None, :]
        dz = torch.einsum("boi,bqid->bqod", w, dh)
        h = act(z)
        dh = dact(z)[..., None] * dz
    w, b = layers[-1]
    value = torch.einsum("boi,bqi->bqo", w, h)[..., 0] + b[:, None, 0]
    grad = torch.einsum("boi,bqid->bqod", w, dh)[..., 0, :]
    return value, grad


@dataclass(frozen=True, eq=False)
class LocalNet:
    """One network: its configuration and a flat parameter vector."""

    config: NetConfig
    theta: torch.Tensor

    def __post_init__(self) -> None:
        if self.theta.shape != (self.config.n_params,):
            raise DimensionMismatchError(
                f"theta shape {tuple(self.theta.shape)} != ({self.config.n_params},)"
            )

    @classmethod
    def initialized(cls, config: NetConfig, seed: int) -> "LocalNet":
        return cls(config, init_params(config, seed))


def _points(x: Any) -> torch.Tensor:
    pts = torch.as_tensor(x, dtype=DTYPE)
    return pts.reshape(-1, 2)


def forward_with_spatial_grad(net: LocalNet, x: Any) -> tuple[torch.Tensor, torch.Tensor]:
    """(value, grad) at point(s) x; shapes follow x without its last axis."""
    pts = torch.as_tensor(x, dtype=DTYPE)
    value, grad = forward_batch(net.config, net.theta[None], _points(pts)[None])
    lead = pts.shape[:-1]
    return value[0].reshape(lead), grad[0].reshape(lead + (2,))


def backprop_theta(
    net: LocalNet,
    x: Any,
    seed_value: Any,
    seed_grad: Any,
    out: torch.Tensor | None = None,
) -> torch.Tensor:
    """
    d/dtheta of sum_x (seed_value * value(x) + seed_grad . grad(x)), added into out
    (a caller-owned buffer of size n_params) when given.
    """
    theta = net.theta.detach().clone().requires_grad_(True)
    pts = _points(x)
    value, grad = forward_batch(net.config, theta[None], pts[None])
    sv = torch.as_tensor(seed_value, dtype=DTYPE).reshape(-1)
    sg = torch.as_tensor(seed_grad, dtype=DTYPE).reshape(-1, 2)
    functional = (sv * value[0]).sum() + (sg * grad[0]).sum()
    (g,) = torch.autograd.grad(functional, theta)
    if out is None:
        return g
    out += g
    return out
