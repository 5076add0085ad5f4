"""
Hierarchical envelope family: l1 on vertex patches, l2*l3 on edge patches and
l1*l2*l3 on single elements (local numbering stored by the patch).
"""

from __future__ import annotations

from functools import cached_property
from typing import Any

from .base import EnvelopeFamily, LocalFunction, monomial_factor


def _product(powers: tuple[int, int, int]) -> tuple:
    return tuple(monomial_factor(p) for p in powers)


class HierarchicalFamily(EnvelopeFamily):
    """One function per vertex, per edge and (optionally) per triangle."""

    kind = "hierarchical"
    order = 2
    edge_divisions = 2

    def __init__(self, include_element_bubbles: bool = True) -> None:
        self.include_element_bubbles = bool(include_element_bubbles)

    @cached_property
    def local_functions(self) -> tuple[LocalFunction, ...]:
        fns = []
        for k in range(3):
            powers = [0, 0, 0]
            powers[k] = 1
            node = [0.0, 0.0, 0.0]
            node[k] = 1.0
            fns.append(LocalFunction("vertex", k, 0, _product(tuple(powers)), tuple(node)))
        for k in range(3):
            powers = [1, 1, 1]
            powers[k] = 0
            node = [0.5, 0.5, 0.5]
            node[k] = 0.0
            fns.append(LocalFunction("edge", k, 1, _product(tuple(powers)), tuple(node)))
        if self.include_element_bubbles:
            third = 1.0 / 3.0
            fns.append(
                LocalFunction("element", 0, 0, _product((1, 1, 1)), (third, third, third))
            )
        return tuple(fns)

    def describe(self) -> dict[str, Any]:
        return {"kind": self.kind, "bubbles": self.include_element_bubbles}

    def __repr__(self) -> str:
        return f"HierarchicalFamily(include_element_bubbles={self.include_element_bubbles})"
