"""
Exception hierarchy for the NN element solver.
Every error raised on purpose by the package derives from NNEMError so callers
(and the CLI exit-code mapping) can catch the whole family at once.
"""

from __future__ import annotations

from typing import Any, Sequence


class NNEMError(Exception):
    """Base class for all solver errors."""


class InvalidArgumentError(NNEMError, ValueError):
    """An argument is outside its documented domain (n = 0, degenerate triangle, ...)."""


class DimensionMismatchError(NNEMError, ValueError):
    """Vector or matrix sizes do not agree."""


class MeshFormatError(NNEMError):
    """Mesh text could not be parsed."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MeshValidationError(NNEMError):
    """A mesh violates one of its structural invariants."""


class OrientationError(MeshValidationError):
    """A triangle has non-positive signed area."""

    def __init__(self, triangle: int, area: float) -> None:
        self.triangle = triangle
        self.area = area
        super().__init__(
            f"triangle {triangle} is not counter-clockwise (signed area {area:.3e})"
        )


class NonConformingMeshError(MeshValidationError):
    """Hanging node, or an edge shared by more than two triangles."""


class NoSolutionError(NNEMError):
    """The linear system has no solution (zero matrix with nonzero right-hand side)."""


class BoundaryRankError(NNEMError):
    """The boundary Gram matrix D is singular."""


class TrainingDivergedError(NNEMError):
    """A parameter gradient became non-finite. Carries the last good state."""

    def __init__(self, index: int, step: int, last_state: Any = None) -> None:
        self.index = index
        self.step = step
        self.last_state = last_state
        super().__init__(
            f"training diverged at step {step}: non-finite gradient for parameter {index}"
        )


class CheckpointError(NNEMError):
    """Checkpoint is truncated, corrupted, or belongs to another run."""

    def __init__(self, message: str, keys: Sequence[str] = ()) -> None:
        self.keys = tuple(keys)
        if self.keys:
            message = f"{message}: {', '.join(self.keys)}"
        super().__init__(message)


class ConfigError(NNEMError):
    """Configuration key unknown, mistyped, or out of range."""

    def __init__(self, message: str, key: str | None = None) -> None:
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class SelfTestError(NNEMError):
    """A built-in self-test failed (see nnem.cli check)."""

    def __init__(self, check: str, detail: str = "") -> None:
        self.check = check
        super().__init__(f"self-test '{check}' failed" + (f": {detail}" if detail else ""))


__all__ = [
    "BoundaryRankError",
    "CheckpointError",
    "ConfigError",
    "DimensionMismatchError",
    "InvalidArgumentError",
    "MeshFormatError",
    "MeshValidationError",
    "NNEMError",
    "NoSolutionError",
    "NonConformingMeshError",
    "OrientationError",
    "SelfTestError",
    "TrainingDivergedError",
]
