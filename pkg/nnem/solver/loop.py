"""
The training loop: assemble, constrain, solve for c, evaluate the Ritz loss, take
the parameter gradient at frozen c, update theta with Adam. The returned solution
is the Galerkin solution in the space of the last parameters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple

import numpy as np
import torch

from ..assembly import (
    SymmetricSystem,
    apply_homogeneous_dirichlet,
    assemble,
    assemble_boundary_system,
    subsystem,
)
from ..constants import EDGE_POINTS_DEFAULT, SOLVE_TAU_DEFAULT
from ..errors import BoundaryRankError, DimensionMismatchError, InvalidArgumentError
from ..localnet import DTYPE
from ..nnspace import NNElementSpace, combine, combine_grad, field_at_quadrature
from ..problems import EllipticProblem
from ..quadrature import TriangleRule, gauss_legendre_1d
from .gradient import loss_parameter_gradient
from .linear import ritz_loss, solve_linear
from .state import HistoryEntry, TrainConfig, TrainState, adam_step

logger = logging.getLogger(__name__)

StepCallback = Callable[[TrainState], None]


@dataclass(frozen=True, eq=False)
class Solution:
    """Psi(x; c, theta) = sum_i c_i psi_i(x; theta)."""

    space: NNElementSpace
    coefficients: torch.Tensor

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def value(self, x: Any) -> np.ndarray:
        return combine(self.space, self.coefficients, x)

    def gradient(self, x: Any) -> np.ndarray:
        return combine_grad(self.space, self.coefficients, x)

    def at_quadrature(self, rule: TriangleRule) -> tuple[torch.Tensor, torch.Tensor]:
        return field_at_quadrature(self.space, self.coefficients, rule)


class GalerkinStep(NamedTuple):
    """
    system/unknowns: the reduced system actually solved and its solution.
    c: full coefficient vector; trial and lift split it into the solved part and the
    fixed boundary lift (None for homogeneous data). frozen: dofs not trained.
    """

    system: SymmetricSystem
    unknowns: np.ndarray
    c: torch.Tensor
    loss: float
    trial: torch.Tensor
    lift: torch.Tensor | None
    frozen: np.ndarray


def solve_boundary(D: torch.Tensor, G: torch.Tensor, tau: float = SOLVE_TAU_DEFAULT) -> torch.Tensor:
    """c_bd = D^-1 G; a (numerically) singular boundary Gram matrix is an error."""
    if D.shape[0] == 0:
        return torch.zeros(0, dtype=DTYPE)
    evals = torch.linalg.eigvalsh(D)
    if float(evals.min()) <= tau * float(evals.abs().max()):
        raise BoundaryRankError(
            f"boundary Gram matrix is rank deficient (eigenvalues {float(evals.min()):.3e} .. "
            f"{float(evals.max()):.3e}); the boundary basis is linearly dependent on the boundary"
        )
    return torch.linalg.solve(D, G)


def constrained_indices(space: NNElementSpace) -> np.ndarray:
    """Basis functions pinned to zero by the homogeneous Dirichlet modification."""
    if space.bc == "none":
        return space.basis_indices(space.boundary_dof_indices)
    return np.zeros(0, dtype=np.int64)


def galerkin_step(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule: TriangleRule,
    tau: float = SOLVE_TAU_DEFAULT,
    edge_rule: tuple[np.ndarray, np.ndarray] | None = None,
    lift: str = "constant",
) -> GalerkinStep:
    """Assemble and solve in the current space."""
    system = assemble(space, problem, rule)
    n = space.dimension
    empty = np.zeros(0, dtype=np.int64)

    if space.bc != "nonhomogeneous":
        if problem.dirichlet is not None:
            raise InvalidArgumentError(
                f"problem {problem.name!r} has Dirichlet data; build the space with bc='nonhomogeneous'"
            )
        reduced = apply_homogeneous_dirichlet(system, constrained_indices(space))
        c = solve_linear(reduced, tau)
        return GalerkinStep(reduced, np.arange(n), c, ritz_loss(reduced, c), c, None, empty)

    interior = space.basis_indices(space.interior_dof_indices)
    c = torch.zeros(n, dtype=DTYPE)
    lift_vec = None
    if problem.dirichlet is None:
        reduced = subsystem(system, interior)
    else:
        bsys = assemble_boundary_system(
            space, problem, edge_rule or gauss_legendre_1d(EDGE_POINTS_DEFAULT), lift=lift, system=system
        )
        c_bd = solve_boundary(bsys.D, bsys.G, tau)
        inner = subsystem(system, interior)
        # interior right side f - b^T c_bd with b the (boundary x interior) coupling block
        reduced = SymmetricSystem(inner.A, inner.B - bsys.coupling.T @ c_bd)
        c[torch.from_numpy(bsys.boundary_indices)] = c_bd
        lift_vec = c.clone()
    c_in = solve_linear(reduced, tau)
    trial = torch.zeros(n, dtype=DTYPE)
    trial[torch.from_numpy(interior)] = c_in
    c = c + trial
    return GalerkinStep(
        reduced, interior, c, ritz_loss(reduced, c_in), trial, lift_vec, space.boundary_dof_indices
    )


def _history_entry(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule: TriangleRule,
    step: int,
    result: GalerkinStep,
) -> HistoryEntry:
    if not problem.has_exact:
        return HistoryEntry(step, result.loss)
    from ..analysis.norms import error_norms

    norms = error_norms(space, result.c, problem, rule)
    return HistoryEntry(step, result.loss, norms.e_L2, norms.e_H1)


def train(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule: TriangleRule,
    config: TrainConfig,
    state: TrainState | None = None,
    edge_rule: tuple[np.ndarray, np.ndarray] | None = None,
    callback: StepCallback | None = None,
) -> tuple[Solution, TrainState]:
    """
    Run until state.step == config.max_steps (from a fresh state, or continuing a
    resumed one). History holds the loss every log_every steps and at the end.
    """
    if state is None:
        state = TrainState.initial(space.theta, config.seed)
    if state.theta.shape != space.theta.shape:
        raise DimensionMismatchError(
            f"state parameters {tuple(state.theta.shape)} do not fit the space {tuple(space.theta.shape)}"
        )
    steps = config.max_steps
    last = state.history[-1] if state.history else None
    if last is not None and last.step == state.step < steps and state.step % config.log_every:
        # end-of-run entry of an earlier, shorter run
        state = state.replace(history=state.history[:-1])

    if state.step < steps:
        logger.info(
            "Training %d parameters from step %d to %d (lr=%g)",
            state.theta.numel(),
            state.step,
            steps,
            config.learning_rate,
        )
    while state.step < steps:
        current = space.with_theta(state.theta)
        result = galerkin_step(current, problem, rule, config.tau, edge_rule, config.lift)
        state = state.replace(c=result.c)
        if state.step % config.log_every == 0:
            entry = _history_entry(current, problem, rule, state.step, result)
            state = state.record(entry)
            logger.info(
                "step %d: loss %.10e%s",
                entry.step,
                entry.loss,
                "" if entry.e_H1 is None else f", e_L2 {entry.e_L2:.4e}, e_H1 {entry.e_H1:.4e}",
            )
        grad = loss_parameter_gradient(current, problem, rule, result.trial, result.lift, result.frozen)
        state = adam_step(state, grad, config)
        if callback is not None:
            callback(state)

    final_space = space.with_theta(state.theta)
    result = galerkin_step(final_space, problem, rule, config.tau, edge_rule, config.lift)
    state = state.replace(c=result.c).record(
        _history_entry(final_space, problem, rule, state.step, result)
    )
    logger.info("Final Galerkin solve at step %d: loss %.10e", state.step, result.loss)
    return Solution(final_space, result.c), state


def solve_nonhomogeneous(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule: TriangleRule,
    config: TrainConfig,
    edge_rule: tuple[np.ndarray, np.ndarray] | None = None,
) -> Solution:
    """Boundary projection D c_bd = G, then the interior problem with the lift held fixed."""
    if problem.dirichlet is None:
        raise InvalidArgumentError(f"problem {problem.name!r} has no Dirichlet data")
    if space.bc != "nonhomogeneous":
        raise InvalidArgumentError(
            f"space must be built with bc='nonhomogeneous', got {space.bc!r}"
        )
    solution, _ = train(space, problem, rule, config, edge_rule=edge_rule)
    return solution
