"""
Second-order elliptic problems  -div(A grad u) + b u = f  in Omega,  u = g  on the boundary.

Coefficient callables receive physical points of shape (..., 2) and return arrays of
shape (...); gradients return (..., 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import InvalidArgumentError

PointFunction = Callable[[np.ndarray], np.ndarray]


def _identity() -> np.ndarray:
    return np.eye(2)


@dataclass(frozen=True, eq=False)
class EllipticProblem:
    """
    diffusion is a constant symmetric positive definite 2x2 matrix. reaction None
    means b = 0 (coercive only together with a Dirichlet condition). dirichlet None
    means homogeneous data.
    """

    name: str
    source: PointFunction
    diffusion: np.ndarray = field(default_factory=_identity)
    reaction: PointFunction | None = None
    dirichlet: PointFunction | None = None
    exact: PointFunction | None = None
    exact_gradient: PointFunction | None = None

    def __post_init__(self) -> None:
        a = np.asarray(self.diffusion, dtype=np.float64)
        if a.shape != (2, 2):
            raise InvalidArgumentError(f"diffusion must be 2x2, got shape {a.shape}")
        if not np.allclose(a, a.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(a).max())):
            raise InvalidArgumentError("diffusion matrix is not symmetric")
        if np.linalg.eigvalsh(a).min() <= 0.0:
            raise InvalidArgumentError("diffusion matrix is not positive definite")
        a.setflags(write=False)
        object.__setattr__(self, "diffusion", a)

    @property
    def is_homogeneous(self) -> bool:
        return self.dirichlet is None

    @property
    def has_exact(self) -> bool:
        return self.exact is not None and self.exact_gradient is not None

    def source_values(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self.source(points), dtype=np.float64)

    def reaction_values(self, points: np.ndarray) -> np.ndarray:
        if self.reaction is None:
            return np.zeros(points.shape[:-1])
        return np.asarray(self.reaction(points), dtype=np.float64)

    def dirichlet_values(self, points: np.ndarray) -> np.ndarray:
        if self.dirichlet is None:
            return np.zeros(points.shape[:-1])
        return np.asarray(self.dirichlet(points), dtype=np.float64)

    def with_source(self, source: PointFunction, name: str | None = None) -> "EllipticProblem":
        """Same operator and boundary data, different right-hand side."""
        return EllipticProblem(
            name=name or self.name,
            source=source,
            diffusion=self.diffusion,
            reaction=self.reaction,
            dirichlet=self.dirichlet,
        )
