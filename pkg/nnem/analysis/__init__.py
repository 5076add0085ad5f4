"""Error norms, the FEM baseline, convergence studies and diagnostics."""

from __future__ import annotations

from .diagnostics import DiagnosticsReport, diagnostics, interpolate
from .norms import ErrorNorms, error_norms
from .report import ErrorReport, compute_errors, fem_solve, method_label
from .selftest import CheckResult, gradient_check, raise_on_failure, run_self_tests
from .study import (
    CSV_FIELDS,
    METHODS,
    ConvergenceRow,
    ConvergenceTable,
    comparison_table,
    convergence_study,
    observed_order,
)

__all__ = [
    "CSV_FIELDS",
    "METHODS",
    "CheckResult",
    "ConvergenceRow",
    "ConvergenceTable",
    "DiagnosticsReport",
    "ErrorNorms",
    "ErrorReport",
    "comparison_table",
    "compute_errors",
    "convergence_study",
    "diagnostics",
    "error_norms",
    "fem_solve",
    "gradient_check",
    "interpolate",
    "method_label",
    "observed_order",
    "raise_on_failure",
    "run_self_tests",
]
