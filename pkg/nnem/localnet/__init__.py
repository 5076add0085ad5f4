"""Local sine-activated networks with forward spatial and reverse parameter derivatives."""

from __future__ import annotations

from .network import (
    ACTIVATIONS,
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

__all__ = [
    "ACTIVATIONS",
    "DTYPE",
    "LocalNet",
    "NetConfig",
    "backprop_theta",
    "forward_batch",
    "forward_with_spatial_grad",
    "init_params",
    "init_params_batch",
    "unpack",
]
