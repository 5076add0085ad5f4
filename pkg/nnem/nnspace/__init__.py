"""NN element spaces: envelope functions multiplied by local networks."""

from __future__ import annotations

from .space import NNElementSpace, basis_eval_grad, build_space
from .tabulate import (
    ElementBasis,
    QuadratureBasis,
    basis_at_quadrature,
    combine,
    combine_grad,
    combine_on_basis,
    field_at_quadrature,
    tabulate_basis,
)

__all__ = [
    "ElementBasis",
    "NNElementSpace",
    "QuadratureBasis",
    "basis_at_quadrature",
    "basis_eval_grad",
    "build_space",
    "combine",
    "combine_grad",
    "combine_on_basis",
    "field_at_quadrature",
    "tabulate_basis",
]
