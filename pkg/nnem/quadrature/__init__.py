"""Gauss quadrature on [0, 1] and on triangles, and mesh integration."""

from __future__ import annotations

from .integrate import (
    element_integrals,
    integrate_on_element,
    integrate_on_mesh,
    quadrature_weights,
)
from .rules import (
    TriangleRule,
    duffy_triangle_rule,
    gauss_legendre_1d,
    is_exact,
    monomial_errors,
    monomial_reference_integral,
    triangle_rule,
    triangle_rule_36,
)

__all__ = [
    "TriangleRule",
    "duffy_triangle_rule",
    "element_integrals",
    "gauss_legendre_1d",
    "integrate_on_element",
    "integrate_on_mesh",
    "is_exact",
    "monomial_errors",
    "monomial_reference_integral",
    "quadrature_weights",
    "triangle_rule",
    "triangle_rule_36",
]
