"""Error reports for a computed solution, and the FEM baseline."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from ..envelope import EnvelopeFamily
from ..errors import InvalidArgumentError
from ..mesh import Mesh
from ..nnspace import build_space
from ..problems import EllipticProblem
from ..quadrature import TriangleRule
from ..solver import Solution, TrainConfig, train
from .norms import error_norms

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorReport:
    e_L2: float
    e_H1: float
    h: float
    N: int
    steps: int = 0
    seconds: float = 0.0
    e_energy: float | None = None
    method: str = ""

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def compute_errors(
    solution: Solution,
    problem: EllipticProblem,
    rule: TriangleRule,
    steps: int = 0,
    seconds: float = 0.0,
    method: str = "",
) -> ErrorReport:
    """L2 error and H1-seminorm error of the solution by mesh quadrature."""
    if not problem.has_exact:
        raise InvalidArgumentError(f"problem {problem.name!r} has no exact solution")
    norms = error_norms(solution.space, solution.coefficients, problem, rule)
    return ErrorReport(
        e_L2=norms.e_L2,
        e_H1=norms.e_H1,
        h=solution.space.mesh.h,
        N=solution.dimension,
        steps=steps,
        seconds=seconds,
        e_energy=norms.e_energy,
        method=method,
    )


def method_label(kind: str, family: EnvelopeFamily) -> str:
    return f"{kind.upper()}P{family.order}"


def fem_solve(
    mesh: Mesh,
    family: EnvelopeFamily,
    problem: EllipticProblem,
    rule: TriangleRule,
    edge_rule: tuple[np.ndarray, np.ndarray] | None = None,
    config: TrainConfig | None = None,
) -> tuple[Solution, ErrorReport | None]:
    """Classical Galerkin solution in the envelope family's polynomial space (constants only)."""
    start = time.perf_counter()
    bc = "homogeneous" if problem.is_homogeneous else "nonhomogeneous"
    space = build_space(mesh, family, bc=bc, networks=False)
    config = TrainConfig(max_steps=0, **({} if config is None else {"tau": config.tau, "lift": config.lift}))
    solution, _ = train(space, problem, rule, config, edge_rule=edge_rule)
    seconds = time.perf_counter() - start
    if not problem.has_exact:
        return solution, None
    report = compute_errors(solution, problem, rule, 0, seconds, method_label("fem", family))
    logger.info(
        "%s h=%.4g N=%d: e_H1=%.4e e_L2=%.4e", report.method, report.h, report.N, report.e_H1, report.e_L2
    )
    return solution, report
