"""
Batched evaluation of every basis function of an NN element space on a set of
triangles. Each (triangle, local function) slot gathers its dof's parameters, so a
single forward pass evaluates all local networks.
"""

from __future__ import annotations

from typing import Any, NamedTuple

import numpy as np
import torch

from ..errors import DimensionMismatchError, InvalidArgumentError
from ..localnet import DTYPE, forward_batch
from ..mesh import barycentric, locate
from ..quadrature import TriangleRule, quadrature_weights
from .space import NNElementSpace


class ElementBasis(NamedTuple):
    """
    index (ns, nb): basis number per slot (0 for inactive slots, whose values are 0).
    values (ns, nb, q), grads (ns, nb, q, 2), active (ns, nb), points (ns, q, 2).
    """

    index: torch.Tensor
    values: torch.Tensor
    grads: torch.Tensor
    active: torch.Tensor
    points: torch.Tensor


def tabulate_basis(
    space: NNElementSpace,
    bary: np.ndarray,
    triangles: Any = None,
    theta: torch.Tensor | None = None,
) -> ElementBasis:
    """
    Basis values and gradients on the selected triangles.
    bary is (q, 3) for the same points on every triangle or (ns, q, 3).
    Passing theta (n_dofs, n_params) with requires_grad keeps the graph to it.
    """
    mesh = space.mesh
    tri = np.arange(mesh.n_triangles) if triangles is None else np.asarray(triangles, dtype=np.int64)
    bary = np.asarray(bary, dtype=np.float64)
    env_np, genv_np = space.family.tabulate(mesh, bary, tri)
    table = space.dof_table[tri]
    active_np = table >= 0
    env = torch.from_numpy(env_np * active_np[..., None])
    genv = torch.from_numpy(genv_np * active_np[..., None, None])
    points = torch.from_numpy(mesh.to_physical(bary, tri))
    ns, nf, q = env.shape
    safe = torch.from_numpy(np.where(active_np, table, 0))

    values, grads, index = [], [], []
    for slot, partner in enumerate(space.partners()):
        index.append(safe * space.per_dof + slot)
        if partner == "constant":
            values.append(env)
            grads.append(genv)
            continue
        params = space.theta if theta is None else theta
        x = points[:, None].expand(ns, nf, q, 2).reshape(ns * nf, q, 2)
        nv, ng = forward_batch(space.net_config, params[safe.reshape(-1)], x)
        nv = nv.reshape(ns, nf, q)
        ng = ng.reshape(ns, nf, q, 2)
        values.append(env * nv)
        grads.append(nv[..., None] * genv + env[..., None] * ng)

    per = space.per_dof
    active = torch.from_numpy(active_np)
    return ElementBasis(
        index=torch.stack(index, dim=2).reshape(ns, nf * per),
        values=torch.stack(values, dim=2).reshape(ns, nf * per, q),
        grads=torch.stack(grads, dim=2).reshape(ns, nf * per, q, 2),
        active=active[:, :, None].expand(ns, nf, per).reshape(ns, nf * per),
        points=points,
    )


class QuadratureBasis(NamedTuple):
    basis: ElementBasis
    weights: torch.Tensor  # (nt, q) physical weights


def basis_at_quadrature(
    space: NNElementSpace, rule: TriangleRule, theta: torch.Tensor | None = None
) -> QuadratureBasis:
    basis = tabulate_basis(space, rule.points, theta=theta)
    return QuadratureBasis(basis, torch.from_numpy(quadrature_weights(space.mesh, rule)))


def _coefficients(space: NNElementSpace, c: Any) -> torch.Tensor:
    coeffs = torch.as_tensor(c, dtype=DTYPE).reshape(-1)
    if coeffs.shape[0] != space.dimension:
        raise DimensionMismatchError(
            f"coefficient vector has length {coeffs.shape[0]}, space dimension is {space.dimension}"
        )
    return coeffs


def combine_on_basis(
    basis: ElementBasis, c: torch.Tensor
) -> tuple[torch.Tensor, torch.Tensor]:
    """sum_i c_i Psi_i and its gradient at the tabulated points: (ns, q), (ns, q, 2)."""
    weights = c[basis.index] * basis.active
    value = torch.einsum("sb,sbq->sq", weights, basis.values)
    grad = torch.einsum("sb,sbqd->sqd", weights, basis.grads)
    return value, grad


def field_at_quadrature(
    space: NNElementSpace, c: Any, rule: TriangleRule
) -> tuple[torch.Tensor, torch.Tensor]:
    """Field values (nt, q) and gradients (nt, q, 2) at the rule's points."""
    coeffs = _coefficients(space, c)
    with torch.no_grad():
        return combine_on_basis(tabulate_basis(space, rule.points), coeffs)


def _locate_points(space: NNElementSpace, x: Any) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    pts = np.asarray(x, dtype=np.float64)
    if pts.shape[-1] != 2:
        raise DimensionMismatchError(f"points must have a trailing axis of 2, got {pts.shape}")
    flat = pts.reshape(-1, 2)
    tri = locate(space.mesh, flat)
    if np.any(tri < 0):
        bad = flat[int(np.flatnonzero(tri < 0)[0])]
        raise InvalidArgumentError(f"point {tuple(bad)} lies outside the mesh")
    corners = space.mesh.corners[tri]
    bary = np.stack([barycentric(corners[i], flat[i]) for i in range(len(flat))])
    return tri, bary[:, None, :], pts.shape[:-1]


def combine(space: NNElementSpace, c: Any, x: Any) -> np.ndarray:
    """u(x) = sum_i c_i Psi_i(x) at physical point(s) x of shape (..., 2)."""
    coeffs = _coefficients(space, c)
    tri, bary, lead = _locate_points(space, x)
    with torch.no_grad():
        value, _ = combine_on_basis(tabulate_basis(space, bary, tri), coeffs)
    return value[:, 0].numpy().reshape(lead)


def combine_grad(space: NNElementSpace, c: Any, x: Any) -> np.ndarray:
    """grad u(x) at physical point(s) x; shape (..., 2)."""
    coeffs = _coefficients(space, c)
    tri, bary, lead = _locate_points(space, x)
    with torch.no_grad():
        _, grad = combine_on_basis(tabulate_basis(space, bary, tri), coeffs)
    return grad[:, 0].numpy().reshape(lead + (2,))
