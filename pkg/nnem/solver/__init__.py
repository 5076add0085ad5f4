"""Linear solve, Ritz loss, parameter gradients, Adam training and checkpoints."""

from __future__ import annotations

from .checkpoint import (
    MAGIC,
    RESUMABLE_KEYS,
    checkpoint_load,
    checkpoint_save,
    fingerprint_hash,
    run_fingerprint,
)
from .gradient import field_energy, loss_parameter_gradient
from .linear import residual_norm, ritz_loss, solve_linear
from .loop import (
    GalerkinStep,
    Solution,
    constrained_indices,
    galerkin_step,
    solve_boundary,
    solve_nonhomogeneous,
    train,
)
from .state import HistoryEntry, TrainConfig, TrainState, adam_step

__all__ = [
    "MAGIC",
    "RESUMABLE_KEYS",
    "GalerkinStep",
    "HistoryEntry",
    "Solution",
    "TrainConfig",
    "TrainState",
    "adam_step",
    "checkpoint_load",
    "checkpoint_save",
    "constrained_indices",
    "field_energy",
    "fingerprint_hash",
    "galerkin_step",
    "loss_parameter_gradient",
    "residual_norm",
    "ritz_loss",
    "run_fingerprint",
    "solve_boundary",
    "solve_linear",
    "solve_nonhomogeneous",
    "train",
]
