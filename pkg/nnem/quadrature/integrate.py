"""Element and mesh integration with a TriangleRule."""

from __future__ import annotations

import math
from typing import Any, Callable

import numpy as np

from ..mesh import Mesh
from .rules import TriangleRule

PointFunction = Callable[[np.ndarray], Any]


def integrate_on_element(f: PointFunction, triangle: Any, rule: TriangleRule) -> float:
    """
    sum_q w_q * 2|K| * f(x_q). f receives the physical points as an array of
    shape (q, 2) and returns q values.
    """
    corners = np.asarray(triangle, dtype=np.float64).reshape(3, 2)
    d1 = corners[1] - corners[0]
    d2 = corners[2] - corners[0]
    two_area = abs(d1[0] * d2[1] - d2[0] * d1[1])
    points = rule.points @ corners
    values = np.asarray(f(points), dtype=np.float64).reshape(rule.size)
    return float(two_area * np.dot(rule.weights, values))


def element_integrals(f: PointFunction, mesh: Mesh, rule: TriangleRule) -> np.ndarray:
    """Integral of f over every triangle, shape (nt,)."""
    points = mesh.to_physical(rule.points)
    values = np.asarray(f(points.reshape(-1, 2)), dtype=np.float64)
    values = values.reshape(mesh.n_triangles, rule.size)
    return 2.0 * mesh.areas * (values @ rule.weights)


def integrate_on_mesh(
    f: PointFunction,
    mesh: Mesh,
    rule: TriangleRule,
    deterministic: bool = True,
) -> float:
    """Sum of the element integrals; deterministic mode reduces in ascending triangle order."""
    per_element = element_integrals(f, mesh, rule)
    if deterministic:
        return math.fsum(per_element.tolist())
    return float(per_element.sum())


def quadrature_weights(mesh: Mesh, rule: TriangleRule) -> np.ndarray:
    """Physical weights w_q * 2|K|, shape (nt, q)."""
    return 2.0 * mesh.areas[:, None] * rule.weights[None, :]
