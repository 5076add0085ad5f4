"""
Boundary system for non-homogeneous Dirichlet data: the boundary Gram matrix D,
the moments G of g, both integrated edge by edge with Gauss-Legendre, and the
coupling block a(psi_in, psi_bd) of the stiffness matrix.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np
import torch

from ..errors import InvalidArgumentError
from ..localnet import DTYPE
from ..nnspace import NNElementSpace, tabulate_basis
from ..problems import EllipticProblem
from ..quadrature import TriangleRule
from .system import SymmetricSystem, assemble

logger = logging.getLogger(__name__)

LIFTS = ("constant", "full")


class BoundarySystem(NamedTuple):
    """
    D (n_bd, n_bd), G (n_bd,) over the lifting basis; coupling (n_bd, n_in) with
    coupling[j, i] = a(psi_in_i, psi_bd_j). Index arrays are basis numbers in the space.
    """

    D: torch.Tensor
    G: torch.Tensor
    coupling: torch.Tensor
    boundary_indices: np.ndarray
    interior_indices: np.ndarray
    system: SymmetricSystem


def lifting_indices(space: NNElementSpace, lift: str = "constant") -> np.ndarray:
    """Basis numbers of the boundary functions used to represent g."""
    if lift not in LIFTS:
        raise InvalidArgumentError(f"boundary lift must be one of {LIFTS}, got {lift!r}")
    partner = "constant" if (lift == "constant" and space.augment_constant) else None
    return space.basis_indices(space.boundary_dof_indices, partner)


def boundary_edge_points(
    space: NNElementSpace, rule_1d: tuple[np.ndarray, np.ndarray]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(triangle per boundary edge, barycentric points (ne, q, 3), physical weights (ne, q))."""
    mesh = space.mesh
    nodes, weights = (np.asarray(a, dtype=np.float64) for a in rule_1d)
    edges = np.flatnonzero(mesh.boundary_edge)
    tri = mesh.edge_triangles[edges, 0]
    local = np.argmax(mesh.triangle_edges[tri] == edges[:, None], axis=1)
    bary = np.zeros((len(edges), len(nodes), 3))
    rows = np.arange(len(edges))[:, None]
    bary[rows, :, ((local + 1) % 3)[:, None]] = 1.0 - nodes[None, :]
    bary[rows, :, ((local + 2) % 3)[:, None]] = nodes[None, :]
    return tri, bary, mesh.edge_lengths[edges][:, None] * weights[None, :]


def assemble_boundary_system(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule_1d: tuple[np.ndarray, np.ndarray],
    triangle_rule: TriangleRule | None = None,
    lift: str = "constant",
    system: SymmetricSystem | None = None,
) -> BoundarySystem:
    if problem.dirichlet is None:
        raise InvalidArgumentError(f"problem {problem.name!r} has no Dirichlet data")
    if space.bc != "nonhomogeneous":
        raise InvalidArgumentError(
            f"boundary system needs a space built with bc='nonhomogeneous', got {space.bc!r}"
        )
    if system is None:
        if triangle_rule is None:
            raise InvalidArgumentError("triangle_rule is required to assemble the coupling block")
        system = assemble(space, problem, triangle_rule)

    bd = lifting_indices(space, lift)
    interior = space.basis_indices(space.interior_dof_indices)
    position = np.full(space.dimension, -1, dtype=np.int64)
    position[bd] = np.arange(len(bd))

    tri, bary, weights = boundary_edge_points(space, rule_1d)
    with torch.no_grad():
        basis = tabulate_basis(space, bary, tri)
    pos = torch.from_numpy(position)[basis.index]
    keep = basis.active & (pos >= 0)
    pos = torch.where(keep, pos, torch.zeros_like(pos))
    values = basis.values * keep[..., None]
    w = torch.from_numpy(weights)
    g = torch.from_numpy(np.ascontiguousarray(problem.dirichlet_values(basis.points.numpy())))

    n_bd = len(bd)
    nb = pos.shape[1]
    local = torch.einsum("sq,sbq,scq->sbc", w, values, values)
    D = torch.zeros((n_bd, n_bd), dtype=DTYPE)
    D.index_put_(
        (
            pos[:, :, None].expand(-1, nb, nb).reshape(-1),
            pos[:, None, :].expand(-1, nb, nb).reshape(-1),
        ),
        local.reshape(-1),
        accumulate=True,
    )
    G = torch.zeros(n_bd, dtype=DTYPE)
    G.index_put_((pos.reshape(-1),), torch.einsum("sq,sbq->sb", w * g, values).reshape(-1), accumulate=True)
    D = 0.5 * (D + D.T)

    coupling = system.A[torch.from_numpy(bd)][:, torch.from_numpy(interior)]
    logger.debug(
        "Boundary system: %d lifting functions on %d edges, %d interior basis functions",
        n_bd,
        len(tri),
        len(interior),
    )
    return BoundarySystem(D, G, coupling, bd, interior, system)
