"""
Element-wise assembly of the stiffness matrix and load vector

    A[m, n] = sum_K int_K (A grad phi_n . grad phi_m + b phi_n phi_m)
    B[m]    = sum_K int_K f phi_m

on an NN element space. Each triangle produces a dense local block over the basis
functions active on it; blocks are scattered into a dense symmetric matrix in
ascending triangle order.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, NamedTuple, Sequence

import numpy as np
import torch

from ..errors import DimensionMismatchError, InvalidArgumentError, NNEMError
from ..localnet import DTYPE
from ..nnspace import ElementBasis, NNElementSpace, basis_at_quadrature
from ..problems import EllipticProblem
from ..quadrature import TriangleRule

logger = logging.getLogger(__name__)

SYSTEM_HEADER = "%%sym-dense v1"


class SymmetricSystem(NamedTuple):
    A: torch.Tensor
    B: torch.Tensor

    @property
    def size(self) -> int:
        return int(self.B.shape[0])


class ElementBlocks(NamedTuple):
    """Local matrices (nt, nb, nb) and vectors (nt, nb) with their global indices."""

    matrices: torch.Tensor
    vectors: torch.Tensor
    index: torch.Tensor
    active: torch.Tensor


def coefficient_fields(
    problem: EllipticProblem, points: torch.Tensor
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Diffusion matrix (2, 2), reaction b and source f at the points (..., 2)."""
    pts = points.detach().numpy()
    return (
        torch.from_numpy(np.array(problem.diffusion)),
        torch.from_numpy(np.ascontiguousarray(problem.reaction_values(pts))),
        torch.from_numpy(np.ascontiguousarray(problem.source_values(pts))),
    )


def element_blocks(
    basis: ElementBasis, weights: torch.Tensor, problem: EllipticProblem
) -> ElementBlocks:
    diffusion, reaction, source = coefficient_fields(problem, basis.points)
    flux = torch.einsum("de,sbqe->sbqd", diffusion, basis.grads)
    local = torch.einsum("sq,sbqd,scqd->sbc", weights, flux, basis.grads)
    local = local + torch.einsum("sq,sbq,scq->sbc", weights * reaction, basis.values, basis.values)
    local = 0.5 * (local + local.transpose(1, 2))
    mask = basis.active[:, :, None] & basis.active[:, None, :]
    local = local * mask
    vec = torch.einsum("sq,sbq->sb", weights * source, basis.values) * basis.active
    return ElementBlocks(local, vec, basis.index, basis.active)


def scatter_blocks(blocks: ElementBlocks, size: int) -> SymmetricSystem:
    """Sum local blocks into dense A and B; inactive slots carry zeros at index 0."""
    idx = blocks.index
    nb = idx.shape[1]
    rows = idx[:, :, None].expand(-1, nb, nb).reshape(-1)
    cols = idx[:, None, :].expand(-1, nb, nb).reshape(-1)
    A = torch.zeros((size, size), dtype=DTYPE)
    A.index_put_((rows, cols), blocks.matrices.reshape(-1), accumulate=True)
    B = torch.zeros(size, dtype=DTYPE)
    B.index_put_((idx.reshape(-1),), blocks.vectors.reshape(-1), accumulate=True)
    return SymmetricSystem(A, B)


def assemble(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule: TriangleRule,
) -> SymmetricSystem:
    """Stiffness matrix and load vector of the bilinear form on the space."""
    with torch.no_grad():
        qb = basis_at_quadrature(space, rule)
        blocks = element_blocks(qb.basis, qb.weights, problem)
        system = scatter_blocks(blocks, space.dimension)
    logger.debug(
        "Assembled N=%d system on %d triangles (%d local slots)",
        space.dimension,
        space.mesh.n_triangles,
        blocks.index.shape[1],
    )
    return system


def apply_homogeneous_dirichlet(
    system: SymmetricSystem, indices: Sequence[int] | np.ndarray
) -> SymmetricSystem:
    """Zero the rows and columns of the constrained basis functions, unit diagonal, B = 0 there."""
    idx = torch.as_tensor(np.asarray(indices, dtype=np.int64).reshape(-1))
    if idx.numel() == 0:
        return system
    n = system.size
    if int(idx.min()) < 0 or int(idx.max()) >= n:
        raise InvalidArgumentError(f"constrained index out of range [0, {n})")
    A = system.A.clone()
    B = system.B.clone()
    A[idx, :] = 0.0
    A[:, idx] = 0.0
    A[idx, idx] = 1.0
    B[idx] = 0.0
    return SymmetricSystem(A, B)


def symmetry_defect(system: SymmetricSystem) -> float:
    """max |A - A^T| / max |A| (0 for the zero matrix)."""
    scale = float(system.A.abs().max()) if system.A.numel() else 0.0
    if scale == 0.0:
        return 0.0
    return float((system.A - system.A.T).abs().max()) / scale


def dump_system(system: SymmetricSystem, path: str | Path) -> None:
    """Write the upper triangle of A and all of B as text (1-based indices, 17 digits)."""
    A = system.A.detach().numpy()
    B = system.B.detach().numpy()
    n = len(B)
    rows, cols = np.triu_indices(n)
    keep = A[rows, cols] != 0.0
    lines = [SYSTEM_HEADER, f"{n} {int(keep.sum())}"]
    lines += [f"{i + 1} {j + 1} {A[i, j]:.17g}" for i, j in zip(rows[keep], cols[keep])]
    lines += [f"{b:.17g}" for b in B]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_system(path: str | Path) -> SymmetricSystem:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or text[0].strip() != SYSTEM_HEADER:
        raise NNEMError(f"{path}: missing {SYSTEM_HEADER!r} header")
    try:
        n, nnz = (int(v) for v in text[1].split())
        A = np.zeros((n, n))
        for line in text[2 : 2 + nnz]:
            i, j, value = line.split()
            A[int(i) - 1, int(j) - 1] = A[int(j) - 1, int(i) - 1] = float(value)
        B = np.array([float(v) for v in text[2 + nnz : 2 + nnz + n]])
    except (ValueError, IndexError) as e:
        raise NNEMError(f"{path}: malformed system file") from e
    if len(B) != n:
        raise DimensionMismatchError(f"{path}: expected {n} right-hand side entries, got {len(B)}")
    return SymmetricSystem(torch.from_numpy(A), torch.from_numpy(B))


def subsystem(system: SymmetricSystem, indices: Any) -> SymmetricSystem:
    idx = torch.as_tensor(np.asarray(indices, dtype=np.int64))
    return SymmetricSystem(system.A[idx][:, idx], system.B[idx])
