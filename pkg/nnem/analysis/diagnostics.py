"""Partition-of-unity and mesh-regularity diagnostics, nodal interpolation."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Callable

import numpy as np
import torch

from ..envelope import EnvelopeFamily, LagrangeFamily, partition_functions, pou_constants
from ..errors import InvalidArgumentError
from ..localnet import DTYPE
from ..mesh import Mesh, min_angle, shape_regularity
from ..nnspace import NNElementSpace
from ..quadrature import TriangleRule, triangle_rule_36

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiagnosticsReport:
    overlap: int
    c_inf: float
    c_grad: float
    min_angle: float
    shape_regularity: float
    pou_defect: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def diagnostics(mesh: Mesh, family: EnvelopeFamily, rule: TriangleRule | None = None) -> DiagnosticsReport:
    """
    Overlap bound M, C_inf and C_G estimates of the partition of unity, minimum
    angle and shape regularity of the mesh, and max |sum psi_i - 1| at quadrature points.
    """
    rule = rule or triangle_rule_36()
    constants = pou_constants(mesh, family, rule)
    psi, _, degenerate = partition_functions(mesh, family).at_quadrature(rule)
    total = psi.sum(axis=1)
    defect = float(np.max(np.abs(total - 1.0), where=~degenerate, initial=0.0))
    report = DiagnosticsReport(
        overlap=constants.overlap,
        c_inf=constants.c_inf,
        c_grad=constants.c_grad,
        min_angle=min_angle(mesh),
        shape_regularity=shape_regularity(mesh),
        pou_defect=defect,
    )
    logger.info(
        "diagnostics: M=%d C_inf=%.4g C_G=%.4g min angle %.2f deg, regularity %.4g",
        report.overlap,
        report.c_inf,
        report.c_grad,
        report.min_angle,
        report.shape_regularity,
    )
    return report


def interpolate(space: NNElementSpace, function: Callable[[np.ndarray], Any]) -> torch.Tensor:
    """Coefficients of the nodal Lagrange interpolant, placed in the constant-partner block."""
    if not isinstance(space.family, LagrangeFamily):
        raise InvalidArgumentError("nodal interpolation needs a Lagrange envelope family")
    if not space.augment_constant:
        raise InvalidArgumentError("nodal interpolation needs the constant partner")
    nodes = np.array([d.position for d in space.dofs], dtype=np.float64).reshape(-1, 2)
    c = torch.zeros(space.dimension, dtype=DTYPE)
    values = np.asarray(function(nodes), dtype=np.float64).reshape(-1)
    c[torch.from_numpy(space.partner_indices("constant"))] = torch.from_numpy(values)
    return c
