"""Stiffness and load assembly, Dirichlet handling, boundary systems."""

from __future__ import annotations

from .boundary import (
    LIFTS,
    BoundarySystem,
    assemble_boundary_system,
    boundary_edge_points,
    lifting_indices,
)
from .system import (
    SYSTEM_HEADER,
    ElementBlocks,
    SymmetricSystem,
    apply_homogeneous_dirichlet,
    assemble,
    coefficient_fields,
    dump_system,
    element_blocks,
    load_system,
    scatter_blocks,
    subsystem,
    symmetry_defect,
)

__all__ = [
    "LIFTS",
    "SYSTEM_HEADER",
    "BoundarySystem",
    "ElementBlocks",
    "SymmetricSystem",
    "apply_homogeneous_dirichlet",
    "assemble",
    "assemble_boundary_system",
    "boundary_edge_points",
    "coefficient_fields",
    "dump_system",
    "element_blocks",
    "lifting_indices",
    "load_system",
    "scatter_blocks",
    "subsystem",
    "symmetry_defect",
]
