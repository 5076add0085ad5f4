"""
Envelope families: piecewise polynomials on vertex, edge and element patches.

A family is described on one triangle by its local functions, each a product
p1(l1) * p2(l2) * p3(l3) of univariate polynomials in the barycentric coordinates.
Local functions are glued into global degrees of freedom by their carrier
(vertex, edge or triangle) and their node position on that carrier.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Literal, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from ..errors import InvalidArgumentError
from ..mesh import Mesh, Patch

logger = logging.getLogger(__name__)

Carrier = Literal["vertex", "edge", "element"]
BoundaryCondition = Literal["homogeneous", "nonhomogeneous", "none"]
BOUNDARY_CONDITIONS: tuple[str, ...] = ("homogeneous", "nonhomogeneous", "none")
_CARRIER_RANK = {"vertex": 0, "edge": 1, "element": 2}


@dataclass(frozen=True)
class LocalFunction:
    """
    One shape function on a triangle.
    local_carrier is the local vertex k for vertex functions, the local vertex
    opposite the edge for edge functions, 0 for element functions. edge_position
    counts steps from endpoint (k+1) % 3 towards (k+2) % 3; element functions use
    it as their interior node number.
    """

    carrier: Carrier
    local_carrier: int
    edge_position: int
    factors: tuple[Polynomial, Polynomial, Polynomial]
    node: tuple[float, float, float]


@dataclass(frozen=True)
class DofDescriptor:
    """
    A global envelope function phi_i with support Omega_i = patch.
    local_index[m] is the local function used on patch.member_triangles[m].
    """

    index: int
    carrier: Carrier
    carrier_index: int
    node: int
    patch: Patch
    local_index: tuple[int, ...]
    on_dirichlet_boundary: bool
    position: tuple[float, float]


def factor_polynomial(alpha: int, order: int) -> Polynomial:
    """prod_{j < alpha} (order * l - j) / (j + 1): the Lagrange factor of multi-index entry alpha."""
    p = Polynomial([1.0])
    for j in range(alpha):
        p = p * Polynomial([-j / (j + 1), order / (j + 1)])
    return p


def monomial_factor(power: int) -> Polynomial:
    return Polynomial([0.0] * power + [1.0])


class EnvelopeFamily(ABC):
    """Interface for envelope families (hierarchical, Lagrange Pk)."""

    kind: str = ""
    # Polynomial degree reproduced by the span.
    order: int

    # Steps along an edge between its endpoints; node positions are 1..edge_divisions-1.
    edge_divisions: int = 2

    @property
    @abstractmethod
    def local_functions(self) -> tuple[LocalFunction, ...]:
        """Local shape functions on one triangle, in a fixed order."""

    def describe(self) -> dict[str, Any]:
        return {"kind": self.kind}

    @property
    def n_local(self) -> int:
        return len(self.local_functions)

    # --- evaluation on barycentric points ---

    def local_values(self, bary: np.ndarray) -> np.ndarray:
        """Values of all local functions, shape (n_local,) + bary.shape[:-1]."""
        lam = np.asarray(bary, dtype=np.float64)
        out = []
        for fn in self.local_functions:
            v = np.ones(lam.shape[:-1])
            for i in range(3):
                v = v * fn.factors[i](lam[..., i])
            out.append(v)
        return np.stack(out)

    def local_lambda_derivatives(self, bary: np.ndarray) -> np.ndarray:
        """d(value)/d(l_i) for all local functions, shape (n_local,) + bary.shape[:-1] + (3,)."""
        lam = np.asarray(bary, dtype=np.float64)
        out = []
        for fn in self.local_functions:
            vals = [fn.factors[i](lam[..., i]) for i in range(3)]
            ders = [fn.factors[i].deriv()(lam[..., i]) for i in range(3)]
            out.append(
                np.stack(
                    [
                        ders[0] * vals[1] * vals[2],
                        vals[0] * ders[1] * vals[2],
                        vals[0] * vals[1] * ders[2],
                    ],
                    axis=-1,
                )
            )
        return np.stack(out)

    def tabulate(
        self,
        mesh: Mesh,
        bary: np.ndarray,
        triangles: Sequence[int] | np.ndarray | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Values (ns, n_local, q) and gradients (ns, n_local, q, 2) on the selected
        triangles. bary is (q, 3) for the same points on every triangle, or (ns, q, 3).
        """
        tri = np.arange(mesh.n_triangles) if triangles is None else np.asarray(triangles)
        grad_lambda = mesh.barycentric_gradients()[tri]
        bary = np.asarray(bary, dtype=np.float64)
        if bary.ndim == 2:
            values = np.broadcast_to(
                self.local_values(bary)[None], (len(tri), self.n_local, len(bary))
            )
            grads = np.einsum(
                "fqk,skd->sfqd", self.local_lambda_derivatives(bary), grad_lambda
            )
        else:
            values = np.moveaxis(self.local_values(bary), 0, 1)
            grads = np.einsum(
                "fsqk,skd->sfqd", self.local_lambda_derivatives(bary), grad_lambda
            )
        return np.ascontiguousarray(values), grads

    # --- degrees of freedom ---

    def _global_key(self, mesh: Mesh, t: int, fn: LocalFunction) -> tuple[int, int, int]:
        tri = mesh.triangles[t]
        if fn.carrier == "vertex":
            return (0, int(tri[fn.local_carrier]), 0)
        if fn.carrier == "edge":
            k = fn.local_carrier
            va, vb = tri[(k + 1) % 3], tri[(k + 2) % 3]
            m = fn.edge_position
            node = m - 1 if va < vb else self.edge_divisions - m - 1
            return (1, int(mesh.triangle_edges[t, k]), node)
        return (2, t, fn.edge_position)

    def enumerate_dofs(self, mesh: Mesh, bc: str = "none") -> list[DofDescriptor]:
        """
        Global dofs ordered vertices, edges, triangles (ascending mesh index, then node).
        bc="homogeneous" drops boundary-carried dofs; "nonhomogeneous" lists interior
        dofs first, then boundary dofs; "none" keeps all in canonical order.
        """
        if bc not in BOUNDARY_CONDITIONS:
            raise InvalidArgumentError(f"unknown boundary condition {bc!r}")
        occurrences: dict[tuple[int, int, int], list[tuple[int, int]]] = {}
        for t in range(mesh.n_triangles):
            for f, fn in enumerate(self.local_functions):
                occurrences.setdefault(self._global_key(mesh, t, fn), []).append((t, f))

        patches = mesh.patches
        canonical = []
        for key in sorted(occurrences):
            rank, carrier_index, node = key
            carrier: Carrier = ("vertex", "edge", "element")[rank]  # type: ignore[assignment]
            if carrier == "vertex":
                patch = patches.vertex[carrier_index]
                on_boundary = bool(mesh.boundary_vertex[carrier_index])
            elif carrier == "edge":
                patch = patches.edge[carrier_index]
                on_boundary = bool(mesh.boundary_edge[carrier_index])
            else:
                patch = patches.element[carrier_index]
                on_boundary = False
            by_triangle = dict(occurrences[key])
            local_index = tuple(by_triangle[t] for t in patch.member_triangles)
            t0 = patch.member_triangles[0]
            node_bary = np.array(self.local_functions[local_index[0]].node)
            position = node_bary @ mesh.vertices[mesh.triangles[t0]]
            canonical.append(
                (carrier, carrier_index, node, patch, local_index, on_boundary, position)
            )

        if bc == "homogeneous":
            selected = [d for d in canonical if not d[5]]
        elif bc == "nonhomogeneous":
            selected = [d for d in canonical if not d[5]] + [d for d in canonical if d[5]]
        else:
            selected = canonical
        dofs = [
            DofDescriptor(
                index=i,
                carrier=c,
                carrier_index=ci,
                node=nd,
                patch=p,
                local_index=li,
                on_dirichlet_boundary=ob,
                position=(float(pos[0]), float(pos[1])),
            )
            for i, (c, ci, nd, p, li, ob, pos) in enumerate(selected)
        ]
        logger.debug(
            "%s: %d dofs (bc=%s) on %d triangles", self.kind, len(dofs), bc, mesh.n_triangles
        )
        return dofs

    def dof_table(self, mesh: Mesh, dofs: Sequence[DofDescriptor]) -> np.ndarray:
        """(nt, n_local) map from local function to position in dofs, -1 when inactive."""
        table = np.full((mesh.n_triangles, self.n_local), -1, dtype=np.int64)
        for i, dof in enumerate(dofs):
            table[list(dof.patch.member_triangles), list(dof.local_index)] = i
        return table


def split_dofs(
    dofs: Sequence[DofDescriptor],
) -> tuple[list[DofDescriptor], list[DofDescriptor]]:
    """(interior, boundary) partition of a dof list."""
    interior = [d for d in dofs if not d.on_dirichlet_boundary]
    boundary = [d for d in dofs if d.on_dirichlet_boundary]
    return interior, boundary
