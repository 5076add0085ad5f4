"""Pointwise evaluation of a single envelope function phi_i on one triangle."""

from __future__ import annotations

import numpy as np

from ..mesh import Mesh
from .base import DofDescriptor, EnvelopeFamily


def envelope_eval(
    family: EnvelopeFamily,
    dof: DofDescriptor,
    mesh: Mesh,
    triangle: int,
    bary: np.ndarray,
) -> np.ndarray:
    """Value of phi_i at barycentric point(s) of triangle; 0 when the triangle is outside Omega_i."""
    lam = np.asarray(bary, dtype=np.float64)
    m = dof.patch.position(int(triangle))
    if m < 0:
        return np.zeros(lam.shape[:-1])
    fn = family.local_functions[dof.local_index[m]]
    value = np.ones(lam.shape[:-1])
    for i in range(3):
        value = value * fn.factors[i](lam[..., i])
    return value


def envelope_grad(
    family: EnvelopeFamily,
    dof: DofDescriptor,
    mesh: Mesh,
    triangle: int,
    bary: np.ndarray,
) -> np.ndarray:
    """Gradient of phi_i (chain rule over the barycentric gradients); (0, 0) outside Omega_i."""
    lam = np.asarray(bary, dtype=np.float64)
    m = dof.patch.position(int(triangle))
    if m < 0:
        return np.zeros(lam.shape[:-1] + (2,))
    derivs = family.local_lambda_derivatives(lam)[dof.local_index[m]]
    grad_lambda = mesh.barycentric_gradients()[int(triangle)]
    return derivs @ grad_lambda
