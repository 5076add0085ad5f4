"""
Envelope functions on the mesh: hierarchical and Lagrange Pk families, dof
enumeration under Dirichlet constraints, and the partition of unity.
"""

from __future__ import annotations

import logging

from ..errors import InvalidArgumentError
from ..mesh import Mesh
from .base import (
    BOUNDARY_CONDITIONS,
    DofDescriptor,
    EnvelopeFamily,
    LocalFunction,
    split_dofs,
)
from .evaluate import envelope_eval, envelope_grad
from .hierarchical import HierarchicalFamily
from .lagrange import LagrangeFamily
from .partition import (
    PartitionOfUnity,
    PartitionSample,
    PouConstants,
    partition_functions,
    pou_constants,
)

logger = logging.getLogger(__name__)


def create_family(kind: str, order: int = 2, bubbles: bool = True) -> EnvelopeFamily:
    """Single construction point for envelope families."""
    kind = (kind or "lagrange").lower()
    if kind == "hierarchical":
        return HierarchicalFamily(include_element_bubbles=bubbles)
    if kind == "lagrange":
        return LagrangeFamily(order=order)
    raise InvalidArgumentError(f"unknown envelope family {kind!r}")


def enumerate_dofs(mesh: Mesh, family: EnvelopeFamily, bc: str = "none") -> list[DofDescriptor]:
    return family.enumerate_dofs(mesh, bc)


__all__ = [
    "BOUNDARY_CONDITIONS",
    "DofDescriptor",
    "EnvelopeFamily",
    "HierarchicalFamily",
    "LagrangeFamily",
    "LocalFunction",
    "PartitionOfUnity",
    "PartitionSample",
    "PouConstants",
    "create_family",
    "enumerate_dofs",
    "envelope_eval",
    "envelope_grad",
    "partition_functions",
    "pou_constants",
    "split_dofs",
]
