"""Symmetric linear solve with a rank-revealing fallback, and the discrete Ritz energy."""

from __future__ import annotations

import logging
from typing import Any

import torch

from ..assembly import SymmetricSystem
from ..constants import SOLVE_TAU_DEFAULT
from ..errors import DimensionMismatchError, NoSolutionError
from ..localnet import DTYPE

logger = logging.getLogger(__name__)


def _as_system(system: Any) -> SymmetricSystem:
    A = torch.as_tensor(system[0], dtype=DTYPE)
    B = torch.as_tensor(system[1], dtype=DTYPE)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != B.shape[0]:
        raise DimensionMismatchError(f"matrix {tuple(A.shape)} and vector {tuple(B.shape)} do not match")
    return SymmetricSystem(A, B)


def solve_linear(system: Any, tau: float = SOLVE_TAU_DEFAULT) -> torch.Tensor:
    """
    Cholesky when every pivot is at least tau * max(diag A); otherwise a symmetric
    eigendecomposition that drops eigenvalues below tau * max |eigenvalue|.
    """
    A, B = _as_system(system)
    n = B.shape[0]
    if n == 0:
        return torch.zeros(0, dtype=DTYPE)
    if float(A.abs().max()) == 0.0:
        if float(B.abs().max()) != 0.0:
            raise NoSolutionError("matrix is zero but the right-hand side is not")
        return torch.zeros(n, dtype=DTYPE)

    L, info = torch.linalg.cholesky_ex(A)
    if int(info) == 0:
        pivots = torch.diagonal(L) ** 2
        if float(pivots.min()) >= tau * float(torch.diagonal(A).max()):
            return torch.cholesky_solve(B[:, None], L)[:, 0]
        logger.debug("Cholesky pivot %.3e below cutoff; using eigendecomposition", float(pivots.min()))
    else:
        logger.debug("Cholesky failed at column %d; using eigendecomposition", int(info))

    evals, evecs = torch.linalg.eigh(A)
    cutoff = tau * float(evals.abs().max())
    keep = evals > cutoff
    dropped = int((~keep).sum())
    if dropped:
        logger.warning("Rank-deficient system: dropped %d of %d eigenvalues", dropped, n)
    inv = torch.where(keep, 1.0 / torch.where(keep, evals, torch.ones_like(evals)), torch.zeros_like(evals))
    return evecs @ (inv * (evecs.T @ B))


def ritz_loss(system: Any, c: Any) -> float:
    """1/2 c^T A c - B^T c."""
    A, B = _as_system(system)
    coeffs = torch.as_tensor(c, dtype=DTYPE).reshape(-1)
    if coeffs.shape[0] != B.shape[0]:
        raise DimensionMismatchError(
            f"coefficient vector has length {coeffs.shape[0]}, system has {B.shape[0]}"
        )
    return float(0.5 * coeffs @ (A @ coeffs) - B @ coeffs)


def residual_norm(system: Any, c: Any) -> float:
    """||A c - B|| / ||B|| (absolute when B = 0)."""
    A, B = _as_system(system)
    coeffs = torch.as_tensor(c, dtype=DTYPE).reshape(-1)
    r = float(torch.linalg.norm(A @ coeffs - B))
    scale = float(torch.linalg.norm(B))
    return r / scale if scale > 0 else r
