"""
Partition-of-unity functions psi_i = phi_i / sum_j phi_j over the full dof set,
and sampled estimates of the overlap and Lipschitz constants of the cover.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from ..constants import POU_DENOMINATOR_MIN
from ..mesh import Mesh, overlap_bound
from ..quadrature import TriangleRule
from .base import EnvelopeFamily

logger = logging.getLogger(__name__)


class PartitionSample(NamedTuple):
    """psi values/gradients of the dofs active on one triangle; NaN where degenerate."""

    dofs: np.ndarray
    values: np.ndarray
    gradients: np.ndarray
    degenerate: np.ndarray


class PouConstants(NamedTuple):
    overlap: int
    c_inf: float
    c_grad: float


class PartitionOfUnity:
    """Evaluator for psi_i built over every dof of the family (bc="none")."""

    def __init__(self, mesh: Mesh, family: EnvelopeFamily) -> None:
        self.mesh = mesh
        self.family = family
        self.dofs = family.enumerate_dofs(mesh, "none")
        self.table = family.dof_table(mesh, self.dofs)

    def _normalize(
        self, values: np.ndarray, grads: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # values (..., f, q), grads (..., f, q, 2)
        denom = values.sum(axis=-2, keepdims=True)
        denom_grad = grads.sum(axis=-3, keepdims=True)
        degenerate = np.abs(denom[..., 0, :]) < POU_DENOMINATOR_MIN
        safe = np.where(np.abs(denom) < POU_DENOMINATOR_MIN, np.nan, denom)
        psi = values / safe
        dpsi = (grads * safe[..., None] - values[..., None] * denom_grad) / safe[..., None] ** 2
        return psi, dpsi, degenerate

    def evaluate(self, triangle: int, bary: np.ndarray) -> PartitionSample:
        bary = np.atleast_2d(np.asarray(bary, dtype=np.float64))
        values, grads = self.family.tabulate(self.mesh, bary, [int(triangle)])
        psi, dpsi, degenerate = self._normalize(values[0], grads[0])
        if degenerate.any():
            logger.warning(
                "Partition of unity degenerate at %d point(s) of triangle %d",
                int(degenerate.sum()),
                triangle,
            )
        return PartitionSample(self.table[int(triangle)], psi, dpsi, degenerate)

    def at_quadrature(self, rule: TriangleRule) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """psi (nt, f, q), grad psi (nt, f, q, 2), degenerate mask (nt, q)."""
        values, grads = self.family.tabulate(self.mesh, rule.points)
        return self._normalize(values, grads)


def partition_functions(mesh: Mesh, family: EnvelopeFamily) -> PartitionOfUnity:
    return PartitionOfUnity(mesh, family)


def pou_constants(mesh: Mesh, family: EnvelopeFamily, rule: TriangleRule) -> PouConstants:
    """
    (M, C_inf, C_G): overlap bound, max |psi_i| at quadrature points, and
    max_i diam(Omega_i) * max |grad psi_i| sampled at quadrature points.
    C_G is an empirical estimate, not a bound.
    """
    pou = PartitionOfUnity(mesh, family)
    psi, dpsi, degenerate = pou.at_quadrature(rule)
    ok = ~degenerate[:, None, :]
    c_inf = float(np.max(np.abs(psi), where=ok, initial=0.0))
    grad_norm = np.linalg.norm(dpsi, axis=-1)
    per_slot = np.max(grad_norm, axis=-1, where=ok, initial=0.0)
    diam = np.zeros(pou.table.shape)
    active = pou.table >= 0
    diameters = np.array([d.patch.diameter for d in pou.dofs])
    diam[active] = diameters[pou.table[active]]
    c_grad = float(np.max(per_slot * diam))
    return PouConstants(overlap_bound(mesh, family, "none"), c_inf, c_grad)
