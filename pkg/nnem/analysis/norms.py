"""L2, H1-seminorm and energy-norm errors against a manufactured exact solution."""

from __future__ import annotations

import math
from typing import Any, NamedTuple

import numpy as np

from ..errors import InvalidArgumentError
from ..nnspace import NNElementSpace, field_at_quadrature
from ..problems import EllipticProblem
from ..quadrature import TriangleRule, quadrature_weights


class ErrorNorms(NamedTuple):
    e_L2: float
    e_H1: float
    e_energy: float


def _mesh_sum(per_point: np.ndarray, weights: np.ndarray) -> float:
    return math.fsum((per_point * weights).sum(axis=1).tolist())


def error_norms(
    space: NNElementSpace, c: Any, problem: EllipticProblem, rule: TriangleRule
) -> ErrorNorms:
    if not problem.has_exact:
        raise InvalidArgumentError(f"problem {problem.name!r} has no exact solution")
    value, grad = field_at_quadrature(space, c, rule)
    points = space.mesh.to_physical(rule.points)
    err = problem.exact(points) - value.numpy()
    derr = problem.exact_gradient(points) - grad.numpy()
    weights = quadrature_weights(space.mesh, rule)
    flux = np.einsum("de,tqe->tqd", problem.diffusion, derr)
    energy = np.sum(flux * derr, axis=-1) + problem.reaction_values(points) * err**2
    return ErrorNorms(
        e_L2=math.sqrt(max(_mesh_sum(err**2, weights), 0.0)),
        e_H1=math.sqrt(max(_mesh_sum(np.sum(derr**2, axis=-1), weights), 0.0)),
        e_energy=math.sqrt(max(_mesh_sum(energy, weights), 0.0)),
    )
