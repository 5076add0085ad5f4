"""
Reader and writer for the `nnem-mesh v1` text format.

    nnem-mesh v1
    vertices <n>
    x y b          (n lines, b = 1 on the boundary)
    triangles <m>
    i j k          (m lines, 0-based, counter-clockwise)
"""

from __future__ import annotations

import logging

import numpy as np

from ..errors import MeshFormatError, MeshValidationError
from .core import Mesh, validate_mesh

logger = logging.getLogger(__name__)

MESH_HEADER = "nnem-mesh v1"


def dump_mesh(mesh: Mesh) -> str:
    """Serialize with 17 significant digits so coordinates round-trip exactly."""
    lines = [MESH_HEADER, f"vertices {mesh.n_vertices}"]
    for (x, y), b in zip(mesh.vertices, mesh.boundary_vertex):
        lines.append(f"{x:.17g} {y:.17g} {int(b)}")
    lines.append(f"triangles {mesh.n_triangles}")
    for i, j, k in mesh.triangles:
        lines.append(f"{i} {j} {k}")
    return "\n".join(lines) + "\n"


def _section(lines: list[tuple[int, str]], pos: int, name: str) -> tuple[int, int]:
    if pos >= len(lines):
        raise MeshFormatError(f"missing '{name}' section", lines[-1][0] if lines else 1)
    lineno, text = lines[pos]
    parts = text.split()
    if len(parts) != 2 or parts[0] != name:
        raise MeshFormatError(f"expected '{name} <count>', got {text!r}", lineno)
    try:
        count = int(parts[1])
    except ValueError as e:
        raise MeshFormatError(f"bad {name} count {parts[1]!r}", lineno) from e
    if count < 0:
        raise MeshFormatError(f"negative {name} count", lineno)
    if pos + 1 + count > len(lines):
        raise MeshFormatError(f"file ends inside '{name}' section", lines[-1][0])
    return count, pos + 1


def load_mesh(text: str) -> Mesh:
    """
    Parse and validate a mesh. Boundary flags are recomputed from edge adjacency
    and must agree with the flags stored in the file.
    """
    lines = [
        (i + 1, raw.strip())
        for i, raw in enumerate(text.splitlines())
        if raw.strip() and not raw.lstrip().startswith("#")
    ]
    if not lines or lines[0][1] != MESH_HEADER:
        raise MeshFormatError(f"first line must be {MESH_HEADER!r}", lines[0][0] if lines else 1)

    nv, pos = _section(lines, 1, "vertices")
    vertices = np.empty((nv, 2))
    flags = np.empty(nv, dtype=bool)
    for r in range(nv):
        lineno, row = lines[pos + r]
        parts = row.split()
        if len(parts) != 3 or parts[2] not in ("0", "1"):
            raise MeshFormatError(f"expected 'x y b', got {row!r}", lineno)
        try:
            vertices[r] = (float(parts[0]), float(parts[1]))
        except ValueError as e:
            raise MeshFormatError(f"bad coordinate in {row!r}", lineno) from e
        flags[r] = parts[2] == "1"
    pos += nv

    nt, pos = _section(lines, pos, "triangles")
    triangles = np.empty((nt, 3), dtype=np.int64)
    for r in range(nt):
        lineno, row = lines[pos + r]
        parts = row.split()
        try:
            if len(parts) != 3:
                raise ValueError(row)
            triangles[r] = [int(p) for p in parts]
        except ValueError as e:
            raise MeshFormatError(f"expected 'i j k', got {row!r}", lineno) from e
        if triangles[r].min() < 0 or triangles[r].max() >= nv:
            raise MeshFormatError(f"vertex index out of range in {row!r}", lineno)
    pos += nt
    if pos != len(lines):
        raise MeshFormatError("trailing content after triangles section", lines[pos][0])

    mesh = Mesh.from_arrays(vertices, triangles, metadata={"generator": "file"})
    validate_mesh(mesh)
    if not np.array_equal(flags, mesh.boundary_vertex):
        bad = int(np.flatnonzero(flags != mesh.boundary_vertex)[0])
        raise MeshValidationError(
            f"declared boundary flag of vertex {bad} disagrees with edge adjacency"
        )
    logger.info("Loaded mesh: %d vertices, %d triangles, h=%.6g", nv, nt, mesh.h)
    return mesh
