"""
Conforming triangular meshes: the Mesh container, structural validation and
barycentric geometry.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping

import numpy as np

from ..constants import DEGENERACY_AREA_FACTOR, LOCATE_BLOCK_PAIRS
from ..errors import (
    InvalidArgumentError,
    MeshValidationError,
    NonConformingMeshError,
    OrientationError,
)

logger = logging.getLogger(__name__)

# Edge opposite local vertex k joins local vertices (k+1) % 3 and (k+2) % 3.
OPPOSITE_EDGE = np.array([[1, 2], [2, 0], [0, 1]], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Immutable triangular mesh.

    triangles are counter-clockwise vertex triples; edges are sorted vertex pairs
    in lexicographic order; edge_triangles holds the one or two adjacent triangles
    (-1 pads boundary edges); triangle_edges[t, k] is the edge opposite local vertex k.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    edge_triangles: np.ndarray
    triangle_edges: np.ndarray
    boundary_vertex: np.ndarray
    boundary_edge: np.ndarray
    h: float
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_arrays(
        cls,
        vertices: Any,
        triangles: Any,
        metadata: Mapping[str, Any] | None = None,
    ) -> "Mesh":
        """Build edges, adjacency and boundary flags from vertex and triangle arrays."""
        verts = np.array(vertices, dtype=np.float64).reshape(-1, 2)
        tris = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        if len(tris) == 0:
            raise InvalidArgumentError("mesh has no triangles")
        if tris.min() < 0 or tris.max() >= len(verts):
            raise MeshValidationError("triangle references a vertex index out of range")
        nt = len(tris)
        pairs = np.sort(tris[:, OPPOSITE_EDGE], axis=2).reshape(-1, 2)
        edges, inverse, counts = np.unique(
            pairs, axis=0, return_inverse=True, return_counts=True
        )
        triangle_edges = np.asarray(inverse).reshape(nt, 3)
        if counts.max() > 2:
            bad = int(np.argmax(counts > 2))
            raise NonConformingMeshError(
                f"edge {tuple(edges[bad])} is shared by {counts[bad]} triangles"
            )
        flat_e = triangle_edges.ravel()
        flat_t = np.repeat(np.arange(nt), 3)
        order = np.argsort(flat_e, kind="stable")
        sorted_e = flat_e[order]
        first = np.r_[True, sorted_e[1:] != sorted_e[:-1]]
        edge_triangles = np.full((len(edges), 2), -1, dtype=np.int64)
        edge_triangles[sorted_e, np.where(first, 0, 1)] = flat_t[order]

        boundary_edge = counts == 1
        boundary_vertex = np.zeros(len(verts), dtype=bool)
        boundary_vertex[edges[boundary_edge].ravel()] = True

        lengths = np.linalg.norm(verts[edges[:, 1]] - verts[edges[:, 0]], axis=1)
        for arr in (verts, tris, edges, edge_triangles, triangle_edges, boundary_edge, boundary_vertex):
            arr.setflags(write=False)
        return cls(
            vertices=verts,
            triangles=tris,
            edges=edges,
            edge_triangles=edge_triangles,
            triangle_edges=triangle_edges,
            boundary_vertex=boundary_vertex,
            boundary_edge=boundary_edge,
            h=float(lengths.max()),
            metadata=dict(metadata or {}),
        )

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def corners(self) -> np.ndarray:
        """Vertex coordinates per triangle, shape (nt, 3, 2)."""
        return self.vertices[self.triangles]

    @cached_property
    def signed_areas(self) -> np.ndarray:
        c = self.corners
        d1 = c[:, 1] - c[:, 0]
        d2 = c[:, 2] - c[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d2[:, 0] * d1[:, 1])

    @property
    def areas(self) -> np.ndarray:
        return np.abs(self.signed_areas)

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(
            self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]], axis=1
        )

    @cached_property
    def patches(self) -> Any:
        """Vertex, edge and element patches (built on first use)."""
        from .patches import build_patches

        return build_patches(self)

    def barycentric_gradients(self) -> np.ndarray:
        """Constant gradients of the three barycentric coordinates, shape (nt, 3, 2)."""
        return _gradients_from_corners(self.corners, self.signed_areas)

    def to_physical(self, bary: np.ndarray, triangles: np.ndarray | None = None) -> np.ndarray:
        """
        Map barycentric points to physical coordinates.
        bary has shape (q, 3) (same points on every triangle) or (nt, q, 3).
        """
        corners = self.corners if triangles is None else self.corners[triangles]
        if bary.ndim == 2:
            return np.einsum("qk,tkd->tqd", bary, corners)
        return np.einsum("tqk,tkd->tqd", bary, corners)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.boundary_vertex, other.boundary_vertex)
            and np.array_equal(self.boundary_edge, other.boundary_edge)
        )

    __hash__ = None  # type: ignore[assignment]


def _gradients_from_corners(corners: np.ndarray, signed_areas: np.ndarray) -> np.ndarray:
    x = corners[..., 0]
    y = corners[..., 1]
    two_area = 2.0 * signed_areas[..., None]
    gx = np.stack([y[..., 1] - y[..., 2], y[..., 2] - y[..., 0], y[..., 0] - y[..., 1]], axis=-1)
    gy = np.stack([x[..., 2] - x[..., 1], x[..., 0] - x[..., 2], x[..., 1] - x[..., 0]], axis=-1)
    return np.stack([gx / two_area, gy / two_area], axis=-1)


def _check_triangle(triangle: Any) -> tuple[np.ndarray, float]:
    corners = np.asarray(triangle, dtype=np.float64).reshape(3, 2)
    d1 = corners[1] - corners[0]
    d2 = corners[2] - corners[0]
    signed = 0.5 * (d1[0] * d2[1] - d2[0] * d1[1])
    longest = max(
        np.sum(d1**2), np.sum(d2**2), np.sum((corners[2] - corners[1]) ** 2)
    )
    if abs(signed) <= DEGENERACY_AREA_FACTOR * longest:
        raise InvalidArgumentError(f"degenerate triangle (area {signed:.3e})")
    return corners, signed


def barycentric(triangle: Any, point: Any) -> np.ndarray:
    """
    Barycentric coordinates (l1, l2, l3) of point(s) with respect to triangle.
    point may be a single 2D point or an array of shape (..., 2).
    """
    corners, _ = _check_triangle(triangle)
    p = np.asarray(point, dtype=np.float64)
    jac = np.column_stack([corners[1] - corners[0], corners[2] - corners[0]])
    rhs = (p - corners[0]).reshape(-1, 2).T
    l23 = np.linalg.solve(jac, rhs).T
    lam = np.column_stack([1.0 - l23[:, 0] - l23[:, 1], l23[:, 0], l23[:, 1]])
    return lam.reshape(p.shape[:-1] + (3,))


def barycentric_gradients(triangle: Any) -> np.ndarray:
    """Gradients of the barycentric coordinates, shape (3, 2); rows sum to zero."""
    corners, signed = _check_triangle(triangle)
    return _gradients_from_corners(corners[None], np.array([signed]))[0]


def validate_mesh(mesh: Mesh) -> None:
    """
    Check every structural invariant; raise on the first violation.
    Positive orientation, non-degenerate triangles, 1-2 triangles per edge,
    boundary flags consistent with adjacency, no hanging nodes, h = max edge length.
    """
    areas = mesh.signed_areas
    tol = DEGENERACY_AREA_FACTOR * mesh.h**2
    negative = np.flatnonzero(areas < 0)
    if len(negative):
        t = int(negative[0])
        raise OrientationError(t, float(areas[t]))
    tiny = np.flatnonzero(areas <= tol)
    if len(tiny):
        raise MeshValidationError(f"triangle {int(tiny[0])} is degenerate")

    counts = (mesh.edge_triangles >= 0).sum(axis=1)
    if np.any(counts < 1):
        raise MeshValidationError("edge without adjacent triangle")
    if not np.array_equal(mesh.boundary_edge, counts == 1):
        raise MeshValidationError("boundary edge flags disagree with edge adjacency")
    expected = np.zeros(mesh.n_vertices, dtype=bool)
    expected[mesh.edges[mesh.boundary_edge].ravel()] = True
    if not np.array_equal(mesh.boundary_vertex, expected):
        bad = int(np.flatnonzero(mesh.boundary_vertex != expected)[0])
        raise MeshValidationError(
            f"boundary vertex flag of vertex {bad} disagrees with edge adjacency"
        )
    if mesh.h != float(mesh.edge_lengths.max()):
        raise MeshValidationError("h differs from the maximum edge length")
    _check_conforming(mesh)


def _check_conforming(mesh: Mesh, chunk: int = 512) -> None:
    verts = mesh.vertices
    for start in range(0, mesh.n_edges, chunk):
        e = mesh.edges[start : start + chunk]
        a = verts[e[:, 0]][:, None, :]
        d = (verts[e[:, 1]] - verts[e[:, 0]])[:, None, :]
        rel = verts[None, :, :] - a
        len2 = np.sum(d**2, axis=2)
        cross = d[..., 0] * rel[..., 1] - d[..., 1] * rel[..., 0]
        t = np.sum(d * rel, axis=2) / len2
        on_line = np.abs(cross) <= 1e-10 * len2
        inside = (t > 1e-10) & (t < 1.0 - 1e-10)
        hits = np.argwhere(on_line & inside)
        if len(hits):
            ei, vi = hits[0]
            raise NonConformingMeshError(
                f"vertex {int(vi)} lies inside edge {tuple(int(v) for v in e[ei])}"
            )


def locate(mesh: Mesh, points: Any, tol: float = 1e-12) -> np.ndarray:
    """Index of the first triangle containing each point (-1 when outside the mesh)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    grads = mesh.barycentric_gradients()[:, 1:]
    base = mesh.corners[:, 0]
    out = np.full(len(pts), -1, dtype=np.int64)
    block = max(1, LOCATE_BLOCK_PAIRS // mesh.n_triangles)
    for start in range(0, len(pts), block):
        chunk = pts[start : start + block]
        lam23 = np.einsum("tkd,ptd->ptk", grads, chunk[:, None, :] - base[None])
        inside = np.all(lam23 >= -tol, axis=2) & (1.0 - lam23.sum(axis=2) >= -tol)
        found = inside.any(axis=1)
        out[start : start + block] = np.where(found, inside.argmax(axis=1), -1)
    return out
