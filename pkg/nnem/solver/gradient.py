"""
Gradient of the Ritz energy with respect to the network parameters at frozen c.

With c fixed, 1/2 c^T A(theta) c - B(theta)^T c is the field energy

    1/2 a(Psi, Psi) - (f, Psi) + a(Psi_lift, Psi),   Psi = sum_i c_i psi_i(theta),

so it is evaluated on the quadrature points and differentiated by reverse mode
through every local network at once.
"""

from __future__ import annotations

from typing import Any

import numpy as np
import torch

from ..assembly import coefficient_fields
from ..errors import DimensionMismatchError
from ..localnet import DTYPE
from ..nnspace import NNElementSpace, basis_at_quadrature, combine_on_basis
from ..problems import EllipticProblem
from ..quadrature import TriangleRule


def _coefficients(space: NNElementSpace, c: Any) -> torch.Tensor:
    coeffs = torch.as_tensor(c, dtype=DTYPE).reshape(-1)
    if coeffs.shape[0] != space.dimension:
        raise DimensionMismatchError(
            f"coefficient vector has length {coeffs.shape[0]}, space dimension is {space.dimension}"
        )
    return coeffs


def field_energy(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule: TriangleRule,
    c: Any,
    lift: Any = None,
    theta: torch.Tensor | None = None,
) -> torch.Tensor:
    """Ritz energy of sum c_i psi_i, plus the coupling a(lift, Psi) when lift coefficients are given."""
    qb = basis_at_quadrature(space, rule, theta)
    basis, w = qb.basis, qb.weights
    diffusion, reaction, source = coefficient_fields(problem, basis.points)
    value, grad = combine_on_basis(basis, _coefficients(space, c))
    flux = torch.einsum("de,sqe->sqd", diffusion, grad)
    energy = 0.5 * (w * ((flux * grad).sum(-1) + reaction * value * value)).sum()
    energy = energy - (w * source * value).sum()
    if lift is not None:
        lift_value, lift_grad = combine_on_basis(basis, _coefficients(space, lift))
        lift_flux = torch.einsum("de,sqe->sqd", diffusion, lift_grad)
        energy = energy + (w * ((lift_flux * grad).sum(-1) + reaction * lift_value * value)).sum()
    return energy


def loss_parameter_gradient(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule: TriangleRule,
    c: Any,
    lift: Any = None,
    frozen_dofs: Any = None,
) -> torch.Tensor:
    """
    d/dtheta of the Ritz loss at fixed c, shape (n_dofs, n_params). Rows of
    frozen_dofs (e.g. the boundary lift) are returned as zero.
    """
    if not space.networks:
        return torch.zeros_like(space.theta)
    theta = space.theta.detach().clone().requires_grad_(True)
    energy = field_energy(space, problem, rule, c, lift, theta)
    (grad,) = torch.autograd.grad(energy, theta)
    if frozen_dofs is not None and len(frozen_dofs):
        grad[torch.as_tensor(np.asarray(frozen_dofs, dtype=np.int64))] = 0.0
    return grad
