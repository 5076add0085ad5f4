"""Elliptic model problems and the built-in registry."""

from __future__ import annotations

from .base import EllipticProblem, PointFunction
from .builtin import available_problems, get_problem, register_problem

__all__ = [
    "EllipticProblem",
    "PointFunction",
    "available_problems",
    "get_problem",
    "register_problem",
]
