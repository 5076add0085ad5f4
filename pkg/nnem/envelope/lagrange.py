"""
Lagrange Pk envelope family: the standard nodal basis with nodes at the
barycentric multi-indices alpha / k, |alpha| = k.
"""

from __future__ import annotations

from functools import cached_property
from typing import Any

from ..errors import InvalidArgumentError
from .base import EnvelopeFamily, LocalFunction, factor_polynomial

SUPPORTED_ORDERS = (1, 2, 3)


class LagrangeFamily(EnvelopeFamily):
    """Nodal Pk basis, k in {1, 2, 3}: vertex nodes, k - 1 nodes per edge, interior nodes."""

    kind = "lagrange"

    def __init__(self, order: int = 2) -> None:
        if order not in SUPPORTED_ORDERS:
            raise InvalidArgumentError(
                f"Lagrange order must be one of {SUPPORTED_ORDERS}, got {order!r}"
            )
        self.order = int(order)
        self.edge_divisions = self.order

    def _function(self, carrier: str, local_carrier: int, position: int, alpha: tuple[int, int, int]) -> LocalFunction:
        k = self.order
        return LocalFunction(
            carrier,  # type: ignore[arg-type]
            local_carrier,
            position,
            tuple(factor_polynomial(a, k) for a in alpha),  # type: ignore[arg-type]
            tuple(a / k for a in alpha),  # type: ignore[arg-type]
        )

    @cached_property
    def local_functions(self) -> tuple[LocalFunction, ...]:
        k = self.order
        fns = []
        for v in range(3):
            alpha = [0, 0, 0]
            alpha[v] = k
            fns.append(self._function("vertex", v, 0, tuple(alpha)))
        for opp in range(3):
            a, b = (opp + 1) % 3, (opp + 2) % 3
            for m in range(1, k):
                alpha = [0, 0, 0]
                alpha[a] = k - m
                alpha[b] = m
                fns.append(self._function("edge", opp, m, tuple(alpha)))
        interior = [
            (i, j, k - i - j)
            for i in range(1, k)
            for j in range(1, k - i)
            if k - i - j >= 1
        ]
        for n, alpha in enumerate(interior):
            fns.append(self._function("element", 0, n, alpha))
        return tuple(fns)

    def describe(self) -> dict[str, Any]:
        return {"kind": self.kind, "order": self.order}

    def __repr__(self) -> str:
        return f"LagrangeFamily(order={self.order})"
