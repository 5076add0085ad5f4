"""Training configuration, training state, and the Adam update."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import torch

from ..constants import (
    ADAM_BETA1_DEFAULT,
    ADAM_BETA2_DEFAULT,
    ADAM_EPS_DEFAULT,
    LEARNING_RATE_DEFAULT,
    SOLVE_TAU_DEFAULT,
)
from ..errors import DimensionMismatchError, InvalidArgumentError, TrainingDivergedError


@dataclass(frozen=True)
class TrainConfig:
    max_steps: int = 0
    learning_rate: float = LEARNING_RATE_DEFAULT
    beta1: float = ADAM_BETA1_DEFAULT
    beta2: float = ADAM_BETA2_DEFAULT
    eps: float = ADAM_EPS_DEFAULT
    seed: int = 0
    tau: float = SOLVE_TAU_DEFAULT
    log_every: int = 10
    lift: str = "constant"

    def __post_init__(self) -> None:
        if self.max_steps < 0:
            raise InvalidArgumentError(f"max_steps must be >= 0, got {self.max_steps}")
        if not self.learning_rate > 0:
            raise InvalidArgumentError(f"learning rate must be > 0, got {self.learning_rate}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise InvalidArgumentError("Adam betas must lie in [0, 1)")
        if not self.eps > 0 or not self.tau > 0:
            raise InvalidArgumentError("eps and tau must be > 0")
        if self.log_every < 1:
            raise InvalidArgumentError(f"log_every must be >= 1, got {self.log_every}")


class HistoryEntry(NamedTuple):
    step: int
    loss: float
    e_L2: float | None = None
    e_H1: float | None = None


@dataclass(frozen=True, eq=False)
class TrainState:
    """c, theta (n_dofs, n_params), Adam moments shaped like theta, step count, history."""

    c: torch.Tensor
    theta: torch.Tensor
    m: torch.Tensor
    v: torch.Tensor
    step: int = 0
    seed: int = 0
    history: tuple[HistoryEntry, ...] = ()

    def __post_init__(self) -> None:
        if self.m.shape != self.theta.shape or self.v.shape != self.theta.shape:
            raise DimensionMismatchError("Adam moments must match the parameter shape")
        steps = [h.step for h in self.history]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise InvalidArgumentError("history steps must be strictly increasing")

    @classmethod
    def initial(cls, theta: torch.Tensor, seed: int = 0) -> "TrainState":
        return cls(
            c=torch.zeros(0, dtype=theta.dtype),
            theta=theta.detach().clone(),
            m=torch.zeros_like(theta),
            v=torch.zeros_like(theta),
            seed=seed,
        )

    @property
    def losses(self) -> list[float]:
        return [h.loss for h in self.history]

    def replace(self, **changes) -> "TrainState":
        return dataclasses.replace(self, **changes)

    def record(self, entry: HistoryEntry) -> "TrainState":
        if self.history and self.history[-1].step >= entry.step:
            return self
        return self.replace(history=self.history + (entry,))


def adam_step(state: TrainState, grad: torch.Tensor, config: TrainConfig) -> TrainState:
    """One bias-corrected Adam update of theta; returns a new state with step + 1."""
    if grad.numel() != state.theta.numel():
        raise DimensionMismatchError(
            f"gradient has {grad.numel()} entries, parameters have {state.theta.numel()}"
        )
    g = grad.reshape(state.theta.shape)
    finite = torch.isfinite(g)
    if not bool(finite.all()):
        index = int(torch.nonzero(~finite.reshape(-1))[0])
        raise TrainingDivergedError(index, state.step, last_state=state)
    t = state.step + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * g
    v = config.beta2 * state.v + (1.0 - config.beta2) * g * g
    m_hat = m / (1.0 - config.beta1**t)
    v_hat = v / (1.0 - config.beta2**t)
    theta = state.theta - config.learning_rate * m_hat / (torch.sqrt(v_hat) + config.eps)
    return state.replace(theta=theta, m=m, v=v, step=t)
