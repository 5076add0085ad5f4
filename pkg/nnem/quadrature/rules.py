"""
Gauss rules: Gauss-Legendre on [0, 1] and collapsed-coordinate (Duffy) tensor
rules on the reference triangle (0,0), (1,0), (0,1).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..constants import GAUSS_1D_MAX_POINTS, REQUIRED_EXACT_DEGREE
from ..errors import InvalidArgumentError

logger = logging.getLogger(__name__)


def gauss_legendre_1d(n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre nodes and weights on [0, 1]; exact to degree 2n - 1."""
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= GAUSS_1D_MAX_POINTS:
        raise InvalidArgumentError(
            f"Gauss-Legendre point count must be in [1, {GAUSS_1D_MAX_POINTS}], got {n!r}"
        )
    x, w = np.polynomial.legendre.leggauss(int(n))
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class TriangleRule:
    """
    Quadrature on the reference triangle in barycentric form.
    points[q] = (l1, l2, l3) with reference coordinates (x, y) = (l2, l3);
    weights sum to the reference area 1/2.
    """

    points: np.ndarray
    weights: np.ndarray
    declared_exact_degree: int
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.weights)


def monomial_reference_integral(a: int, b: int) -> float:
    """Exact integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!."""
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


def monomial_errors(rule: TriangleRule, degree: int) -> dict[tuple[int, int], float]:
    """Relative error of the rule on every monomial x^a y^b with a + b <= degree."""
    x = rule.points[:, 1]
    y = rule.points[:, 2]
    out = {}
    for total in range(degree + 1):
        for a in range(total + 1):
            b = total - a
            exact = monomial_reference_integral(a, b)
            approx = float(np.dot(rule.weights, x**a * y**b))
            out[(a, b)] = abs(approx - exact) / exact
    return out


def is_exact(rule: TriangleRule, degree: int, rtol: float = 1e-13) -> bool:
    return max(monomial_errors(rule, degree).values()) <= rtol


def duffy_triangle_rule(n: int, declared_exact_degree: int | None = None) -> TriangleRule:
    """
    n*n-point rule: tensor Gauss-Legendre in (s, t) mapped by (x, y) = (s, t(1 - s))
    with weight factor (1 - s). Exact to degree 2n - 2; the declared degree is capped
    at REQUIRED_EXACT_DEGREE unless given, and is verified here.
    """
    s, ws = gauss_legendre_1d(n)
    t, wt = gauss_legendre_1d(n)
    ss, tt = np.meshgrid(s, t, indexing="ij")
    x = ss.ravel()
    y = (tt * (1.0 - ss)).ravel()
    weights = (np.outer(ws, wt) * (1.0 - ss)).ravel()
    points = np.column_stack([1.0 - x - y, x, y])
    if declared_exact_degree is None:
        declared_exact_degree = min(2 * n - 2, REQUIRED_EXACT_DEGREE)
    rule = TriangleRule(
        points=points,
        weights=weights,
        declared_exact_degree=declared_exact_degree,
        metadata={"construction": "duffy_tensor_gauss_legendre", "points_1d": n},
    )
    if not is_exact(rule, declared_exact_degree):
        raise InvalidArgumentError(
            f"{n * n}-point rule is not exact to declared degree {declared_exact_degree}"
        )
    return rule


def triangle_rule_36() -> TriangleRule:
    """The 36-point rule (6 x 6 collapsed Gauss-Legendre) used for all element integrals."""
    return duffy_triangle_rule(6, declared_exact_degree=REQUIRED_EXACT_DEGREE)


def triangle_rule(n_points: int) -> TriangleRule:
    """Duffy rule with n_points = k^2 points."""
    k = math.isqrt(int(n_points))
    if n_points < 1 or k * k != n_points:
        raise InvalidArgumentError(
            f"triangle rule point count must be a perfect square, got {n_points}"
        )
    return duffy_triangle_rule(k)
