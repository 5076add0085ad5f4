"""
Vertex, edge and element patches with their stored local vertex numbering.

For a vertex patch the patch vertex is local vertex 1 of every member triangle;
for an edge patch the edge endpoints are local vertices 2 and 3. The numbering is
fixed here so envelope evaluation never re-derives orientation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Literal, NamedTuple

import numpy as np

from .core import Mesh

logger = logging.getLogger(__name__)

PatchKind = Literal["vertex", "edge", "element"]


@dataclass(frozen=True)
class Patch:
    """
    Union of triangles around one carrier.
    local_vertices[m] lists the triangle-local indices (0..2) of patch-local
    vertices 1, 2, 3 in member triangle member_triangles[m].
    """

    kind: PatchKind
    carrier: int
    member_triangles: tuple[int, ...]
    local_vertices: tuple[tuple[int, int, int], ...]
    diameter: float

    def position(self, triangle: int) -> int:
        """Index of triangle in member_triangles, or -1."""
        try:
            return self.member_triangles.index(triangle)
        except ValueError:
            return -1

    def __contains__(self, triangle: object) -> bool:
        return triangle in self.member_triangles


class PatchSet(NamedTuple):
    vertex: tuple[Patch, ...]
    edge: tuple[Patch, ...]
    element: tuple[Patch, ...]


def _rotation(k: int) -> tuple[int, int, int]:
    return (k, (k + 1) % 3, (k + 2) % 3)


def _diameter(mesh: Mesh, triangles: list[int]) -> float:
    pts = mesh.vertices[np.unique(mesh.triangles[triangles].ravel())]
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.max(np.sum(diff**2, axis=2))))


def build_patches(mesh: Mesh) -> PatchSet:
    """Patches of every vertex, edge and triangle, member triangles in ascending order."""
    flat_v = mesh.triangles.ravel()
    flat_t = np.repeat(np.arange(mesh.n_triangles), 3)
    flat_k = np.tile(np.arange(3), mesh.n_triangles)
    order = np.argsort(flat_v, kind="stable")
    starts = np.searchsorted(flat_v[order], np.arange(mesh.n_vertices + 1))

    vertex_patches = []
    for z in range(mesh.n_vertices):
        sel = order[starts[z] : starts[z + 1]]
        tris = [int(t) for t in flat_t[sel]]
        vertex_patches.append(
            Patch(
                kind="vertex",
                carrier=z,
                member_triangles=tuple(tris),
                local_vertices=tuple(_rotation(int(k)) for k in flat_k[sel]),
                diameter=_diameter(mesh, tris) if tris else 0.0,
            )
        )

    edge_patches = []
    for e in range(mesh.n_edges):
        tris = [int(t) for t in mesh.edge_triangles[e] if t >= 0]
        local = []
        for t in tris:
            k = int(np.flatnonzero(mesh.triangle_edges[t] == e)[0])
            local.append(_rotation(k))
        edge_patches.append(
            Patch(
                kind="edge",
                carrier=e,
                member_triangles=tuple(tris),
                local_vertices=tuple(local),
                diameter=_diameter(mesh, tris),
            )
        )

    element_patches = tuple(
        Patch(
            kind="element",
            carrier=t,
            member_triangles=(t,),
            local_vertices=((0, 1, 2),),
            diameter=_diameter(mesh, [t]),
        )
        for t in range(mesh.n_triangles)
    )
    return PatchSet(tuple(vertex_patches), tuple(edge_patches), element_patches)


def overlap_bound(mesh: Mesh, family: Any, bc: str = "none") -> int:
    """
    M = max over triangles of the number of dofs whose support contains the triangle.
    family is any envelope family exposing enumerate_dofs(mesh, bc).
    """
    counts = np.zeros(mesh.n_triangles, dtype=np.int64)
    for dof in family.enumerate_dofs(mesh, bc):
        counts[list(dof.patch.member_triangles)] += 1
    return int(counts.max()) if len(counts) else 0
