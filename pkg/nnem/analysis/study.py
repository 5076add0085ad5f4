"""Convergence tables over a sequence of meshes, and their CSV form."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ..envelope import EnvelopeFamily
from ..errors import InvalidArgumentError
from ..localnet import NetConfig
from ..mesh import Mesh, generate_unit_square
from ..nnspace import build_space
from ..problems import EllipticProblem
from ..quadrature import TriangleRule, triangle_rule_36
from ..solver import TrainConfig, train
from .report import ErrorReport, compute_errors, fem_solve, method_label

logger = logging.getLogger(__name__)

CSV_FIELDS = ("method", "h", "N", "e_H1", "e_L2", "order_H1", "order_L2", "steps", "seconds")
METHODS = ("fem", "nnem")


class ConvergenceRow(NamedTuple):
    h: float
    N: int
    e_H1: float
    e_L2: float
    order_H1: float | None
    order_L2: float | None
    steps: int
    seconds: float


def observed_order(e_coarse: float, e_fine: float, h_coarse: float, h_fine: float) -> float | None:
    """log(e_coarse / e_fine) / log(h_coarse / h_fine); None when undefined."""
    if e_coarse <= 0 or e_fine <= 0 or h_coarse == h_fine:
        return None
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


@dataclass(frozen=True)
class ConvergenceTable:
    """Rows sorted by decreasing h; the order columns compare each row with the previous one."""

    method: str
    rows: tuple[ConvergenceRow, ...] = field(default_factory=tuple)

    @classmethod
    def from_reports(cls, method: str, reports: Sequence[ErrorReport]) -> "ConvergenceTable":
        ordered = sorted(reports, key=lambda r: -r.h)
        rows = []
        for i, r in enumerate(ordered):
            prev = ordered[i - 1] if i else None
            rows.append(
                ConvergenceRow(
                    h=r.h,
                    N=r.N,
                    e_H1=r.e_H1,
                    e_L2=r.e_L2,
                    order_H1=observed_order(prev.e_H1, r.e_H1, prev.h, r.h) if prev else None,
                    order_L2=observed_order(prev.e_L2, r.e_L2, prev.h, r.h) if prev else None,
                    steps=r.steps,
                    seconds=r.seconds,
                )
            )
        return cls(method, tuple(rows))

    def final_orders(self) -> tuple[float | None, float | None]:
        """Observed (H1, L2) orders on the finest pair."""
        if len(self.rows) < 2:
            return None, None
        return self.rows[-1].order_H1, self.rows[-1].order_L2

    def to_csv(self, path: str | Path | None = None, include_seconds: bool = True) -> str:
        """CSV text with full-precision floats; also written to path when given."""
        buf = io.StringIO()
        fields = CSV_FIELDS if include_seconds else CSV_FIELDS[:-1]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            record = {"method": self.method, **_format_row(row)}
            w.writerow({k: record[k] for k in fields})
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def _format_row(row: ConvergenceRow) -> dict[str, str]:
    return {
        "h": _fmt(row.h),
        "N": str(row.N),
        "e_H1": _fmt(row.e_H1),
        "e_L2": _fmt(row.e_L2),
        "order_H1": _fmt(row.order_H1),
        "order_L2": _fmt(row.order_L2),
        "steps": str(row.steps),
        "seconds": _fmt(row.seconds),
    }


def comparison_table(tables: Sequence[ConvergenceTable], path: str | Path | None = None) -> str:
    """
    One row per mesh size h, columns e_H1/e_L2 per method (blank where a method did
    not run at that h), finest meshes last.
    """
    sizes = sorted({row.h for t in tables for row in t.rows}, reverse=True)
    fields = ["h"] + [f"{t.method}_{col}" for t in tables for col in ("e_H1", "e_L2")]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for h in sizes:
        record = {"h": _fmt(h)}
        for t in tables:
            match = next((r for r in t.rows if r.h == h), None)
            record[f"{t.method}_e_H1"] = _fmt(match.e_H1) if match else ""
            record[f"{t.method}_e_L2"] = _fmt(match.e_L2) if match else ""
        w.writerow(record)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def convergence_study(
    problem: EllipticProblem,
    family: EnvelopeFamily,
    sizes: Sequence[int],
    config: TrainConfig | None = None,
    method: str = "fem",
    mesh_factory: Callable[[int], Mesh] = generate_unit_square,
    rule: TriangleRule | None = None,
    edge_rule: tuple[np.ndarray, np.ndarray] | None = None,
    net_config: NetConfig | None = None,
    augment_constant: bool = True,
) -> ConvergenceTable:
    """Solve on mesh_factory(n) for every n and tabulate the errors with observed orders."""
    if len(sizes) < 2:
        raise InvalidArgumentError(f"a convergence study needs at least 2 mesh sizes, got {len(sizes)}")
    if method not in METHODS:
        raise InvalidArgumentError(f"method must be one of {METHODS}, got {method!r}")
    rule = rule or triangle_rule_36()
    config = config or TrainConfig()
    reports = []
    for n in sizes:
        mesh = mesh_factory(int(n))
        if method == "fem":
            _, report = fem_solve(mesh, family, problem, rule, edge_rule, config)
        else:
            start = time.perf_counter()
            bc = "homogeneous" if problem.is_homogeneous else "nonhomogeneous"
            space = build_space(
                mesh, family, net_config, bc=bc, seed=config.seed, augment_constant=augment_constant
            )
            solution, state = train(space, problem, rule, config, edge_rule=edge_rule)
            report = compute_errors(
                solution,
                problem,
                rule,
                steps=state.step,
                seconds=time.perf_counter() - start,
                method=method_label(method, family),
            )
        if report is None:
            raise InvalidArgumentError(f"problem {problem.name!r} has no exact solution")
        reports.append(report)
        logger.info(
            "study %s n=%d: h=%.4g N=%d e_H1=%.4e e_L2=%.4e",
            method,
            n,
            report.h,
            report.N,
            report.e_H1,
            report.e_L2,
        )
    return ConvergenceTable.from_reports(method_label(method, family), reports)
