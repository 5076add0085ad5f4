"""
Built-in manufactured problems. New problems are added in code with @register_problem.
"""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from ..errors import ConfigError
from .base import EllipticProblem

logger = logging.getLogger(__name__)

PI = np.pi

_REGISTRY: dict[str, Callable[[], EllipticProblem]] = {}


def register_problem(name: str) -> Callable[[Callable[[], EllipticProblem]], Callable[[], EllipticProblem]]:
    def decorator(factory: Callable[[], EllipticProblem]) -> Callable[[], EllipticProblem]:
        if name in _REGISTRY:
            raise ValueError(f"problem {name!r} registered twice")
        _REGISTRY[name] = factory
        return factory

    return decorator


def available_problems() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(name: str) -> EllipticProblem:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ConfigError(
            f"unknown problem {name!r}; available: {', '.join(available_problems())}",
            key="problem.name",
        ) from None
    problem = factory()
    logger.debug("Problem %s (homogeneous=%s)", name, problem.is_homogeneous)
    return problem


def _sin_sin(p: np.ndarray) -> np.ndarray:
    return np.sin(PI * p[..., 0]) * np.sin(PI * p[..., 1])


def _sin_sin_grad(p: np.ndarray) -> np.ndarray:
    x, y = p[..., 0], p[..., 1]
    return np.stack(
        [PI * np.cos(PI * x) * np.sin(PI * y), PI * np.sin(PI * x) * np.cos(PI * y)],
        axis=-1,
    )


@register_problem("laplace_sine")
def laplace_sine() -> EllipticProblem:
    """-Laplace u = 2 pi^2 sin(pi x) sin(pi y) on the unit square, u = 0 on the boundary."""
    return EllipticProblem(
        name="laplace_sine",
        source=lambda p: 2.0 * PI**2 * _sin_sin(p),
        exact=_sin_sin,
        exact_gradient=_sin_sin_grad,
    )


@register_problem("linear_xy")
def linear_xy() -> EllipticProblem:
    def u(p: np.ndarray) -> np.ndarray:
        return p[..., 0] + p[..., 1]

    return EllipticProblem(
        name="linear_xy",
        source=lambda p: np.zeros(p.shape[:-1]),
        dirichlet=u,
        exact=u,
        exact_gradient=lambda p: np.ones(p.shape[:-1] + (2,)),
    )


@register_problem("sine_plus_x")
def sine_plus_x() -> EllipticProblem:
    def u(p: np.ndarray) -> np.ndarray:
        return _sin_sin(p) + p[..., 0]

    def grad(p: np.ndarray) -> np.ndarray:
        g = _sin_sin_grad(p)
        g[..., 0] += 1.0
        return g

    return EllipticProblem(
        name="sine_plus_x",
        source=lambda p: 2.0 * PI**2 * _sin_sin(p),
        dirichlet=u,
        exact=u,
        exact_gradient=grad,
    )


@register_problem("reaction_sine")
def reaction_sine() -> EllipticProblem:
    return EllipticProblem(
        name="reaction_sine",
        source=lambda p: (2.0 * PI**2 + 1.0) * _sin_sin(p),
        reaction=lambda p: np.ones(p.shape[:-1]),
        exact=_sin_sin,
        exact_gradient=_sin_sin_grad,
    )


@register_problem("anisotropic_sine")
def anisotropic_sine() -> EllipticProblem:
    # -(u_xx + 2 u_yy) with u = sin sin
    return EllipticProblem(
        name="anisotropic_sine",
        source=lambda p: 3.0 * PI**2 * _sin_sin(p),
        diffusion=np.diag([1.0, 2.0]),
        exact=_sin_sin,
        exact_gradient=_sin_sin_grad,
    )
