"""Built-in self-tests behind the check command."""

from __future__ import annotations

import logging
from typing import NamedTuple

import torch

from ..assembly import apply_homogeneous_dirichlet, assemble
from ..constants import REQUIRED_EXACT_DEGREE
from ..envelope import EnvelopeFamily
from ..errors import MeshValidationError, SelfTestError
from ..localnet import NetConfig
from ..mesh import Mesh, generate_unit_square, validate_mesh
from ..nnspace import NNElementSpace, build_space
from ..problems import EllipticProblem, get_problem
from ..quadrature import TriangleRule, gauss_legendre_1d, is_exact, monomial_errors
from ..solver import constrained_indices, galerkin_step, loss_parameter_gradient, ritz_loss
from .diagnostics import DiagnosticsReport, diagnostics

logger = logging.getLogger(__name__)

POU_TOLERANCE = 1e-12
GRADIENT_TOLERANCE = 1e-5


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def gradient_check(
    space: NNElementSpace,
    problem: EllipticProblem,
    rule: TriangleRule,
    samples: int = 20,
    step: float = 1e-5,
    seed: int = 0,
) -> float:
    """
    Max relative deviation between the parameter gradient and central differences of
    [re-assemble, Ritz loss] at frozen c, over `samples` randomly chosen components.
    """
    result = galerkin_step(space, problem, rule)
    c = result.c
    grad = loss_parameter_gradient(space, problem, rule, c).reshape(-1)
    theta0 = space.theta.reshape(-1)
    gen = torch.Generator().manual_seed(seed)
    picks = torch.randperm(theta0.numel(), generator=gen)[: min(samples, theta0.numel())]

    def loss_at(theta: torch.Tensor) -> float:
        s = space.with_theta(theta)
        system = apply_homogeneous_dirichlet(assemble(s, problem, rule), constrained_indices(s))
        return ritz_loss(system, c)

    scale = max(float(grad.abs().max()), 1e-12)
    worst = 0.0
    for k in picks.tolist():
        plus = theta0.clone()
        plus[k] += step
        minus = theta0.clone()
        minus[k] -= step
        fd = (loss_at(plus) - loss_at(minus)) / (2.0 * step)
        worst = max(worst, abs(fd - float(grad[k])) / scale)
    return worst


def run_self_tests(
    mesh: Mesh,
    family: EnvelopeFamily,
    rule: TriangleRule,
    edge_points: int,
    problem: EllipticProblem | None = None,
    seed: int = 0,
) -> tuple[list[CheckResult], DiagnosticsReport | None]:
    results: list[CheckResult] = []

    try:
        validate_mesh(mesh)
        results.append(CheckResult("mesh", True, f"{mesh.n_triangles} triangles, h={mesh.h:.4g}"))
    except MeshValidationError as e:
        results.append(CheckResult("mesh", False, str(e)))

    worst = max(monomial_errors(rule, REQUIRED_EXACT_DEGREE).values())
    results.append(
        CheckResult(
            "quadrature",
            is_exact(rule, REQUIRED_EXACT_DEGREE),
            f"{rule.size}-point rule, max relative monomial error {worst:.2e} up to degree {REQUIRED_EXACT_DEGREE}",
        )
    )
    nodes, weights = gauss_legendre_1d(edge_points)
    edge_error = max(
        abs(float(weights @ nodes**d) - 1.0 / (d + 1)) * (d + 1) for d in range(2 * edge_points)
    )
    results.append(
        CheckResult(
            "edge_quadrature",
            edge_error <= 1e-13,
            f"{edge_points}-point Gauss-Legendre, max relative error {edge_error:.2e}",
        )
    )

    report = None
    if results[0].passed:
        report = diagnostics(mesh, family, rule)
        results.append(
            CheckResult(
                "partition_of_unity",
                report.pou_defect <= POU_TOLERANCE,
                f"max |sum psi - 1| = {report.pou_defect:.2e}, M={report.overlap}",
            )
        )

    if problem is None or not problem.is_homogeneous:
        problem = get_problem("laplace_sine")
    small = build_space(
        generate_unit_square(2), family, NetConfig(hidden_layers=2, width=3), "homogeneous", seed
    )
    deviation = gradient_check(small, problem, rule, seed=seed)
    results.append(
        CheckResult(
            "gradient",
            deviation <= GRADIENT_TOLERANCE,
            f"max relative deviation from central differences {deviation:.2e}",
        )
    )
    for r in results:
        logger.info("self-test %-20s %s  %s", r.name, "ok" if r.passed else "FAILED", r.detail)
    return results, report


def raise_on_failure(results: list[CheckResult]) -> None:
    for r in results:
        if not r.passed:
            raise SelfTestError(r.name, r.detail)
