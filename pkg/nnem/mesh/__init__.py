"""
Conforming triangular meshes: generators, the nnem-mesh v1 format,
barycentric geometry and patch connectivity.
"""

from __future__ import annotations

from .core import Mesh, barycentric, barycentric_gradients, locate, validate_mesh
from .generators import DIAGONAL, generate_l_shape, generate_unit_square
from .io import MESH_HEADER, dump_mesh, load_mesh
from .patches import Patch, PatchSet, build_patches, overlap_bound
from .quality import min_angle, shape_regularity

__all__ = [
    "DIAGONAL",
    "MESH_HEADER",
    "Mesh",
    "Patch",
    "PatchSet",
    "barycentric",
    "barycentric_gradients",
    "build_patches",
    "dump_mesh",
    "generate_l_shape",
    "generate_unit_square",
    "load_mesh",
    "locate",
    "min_angle",
    "overlap_bound",
    "shape_regularity",
    "validate_mesh",
]
