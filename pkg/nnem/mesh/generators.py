"""
Structured mesh generators: the unit square and the L-shape.
Every cell is split along its lower-left to upper-right diagonal; the choice is
recorded in mesh.metadata["diagonal"].
"""

from __future__ import annotations

import logging

import numpy as np

from ..errors import InvalidArgumentError
from .core import Mesh

logger = logging.getLogger(__name__)

DIAGONAL = "lower_left_to_upper_right"


def _split_cells(index: np.ndarray, cells: list[tuple[int, int]]) -> np.ndarray:
    """Two CCW triangles per cell (i, j): (v00, v10, v11) and (v00, v11, v01)."""
    tris = []
    for i, j in cells:
        v00, v10 = index[j, i], index[j, i + 1]
        v01, v11 = index[j + 1, i], index[j + 1, i + 1]
        tris.append((v00, v10, v11))
        tris.append((v00, v11, v01))
    return np.array(tris, dtype=np.int64)


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    return int(n)


def generate_unit_square(n: int) -> Mesh:
    """Structured mesh of (0,1)^2 with n x n cells: (n+1)^2 vertices, 2n^2 triangles, h = sqrt(2)/n."""
    n = _check_n(n)
    ticks = np.arange(n + 1) / n
    xx, yy = np.meshgrid(ticks, ticks)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])
    index = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)
    cells = [(i, j) for j in range(n) for i in range(n)]
    mesh = Mesh.from_arrays(
        vertices,
        _split_cells(index, cells),
        metadata={"generator": "unit_square", "n": n, "diagonal": DIAGONAL},
    )
    logger.debug("Unit square mesh n=%d: %d triangles, h=%.6g", n, mesh.n_triangles, mesh.h)
    return mesh


def generate_l_shape(n: int) -> Mesh:
    """
    Mesh of [0,2]^2 minus the upper-right unit square, n cells per unit leg.
    n = 1 gives the 8-vertex, 6-triangle topology with 5 interior edges and no
    interior vertex; n = 2^k equals k uniform red refinements of it.
    """
    n = _check_n(n)
    m = 2 * n
    ticks = np.arange(m + 1) / n
    keep = np.zeros((m + 1, m + 1), dtype=bool)
    for j in range(m + 1):
        for i in range(m + 1):
            keep[j, i] = not (i > n and j > n)
    index = np.full((m + 1, m + 1), -1, dtype=np.int64)
    index[keep] = np.arange(int(keep.sum()))
    xx, yy = np.meshgrid(ticks, ticks)
    vertices = np.column_stack([xx[keep], yy[keep]])
    cells = [(i, j) for j in range(m) for i in range(m) if not (i >= n and j >= n)]
    mesh = Mesh.from_arrays(
        vertices,
        _split_cells(index, cells),
        metadata={"generator": "l_shape", "n": n, "diagonal": DIAGONAL},
    )
    logger.debug("L-shape mesh n=%d: %d triangles, h=%.6g", n, mesh.n_triangles, mesh.h)
    return mesh
