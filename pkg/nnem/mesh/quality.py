"""Mesh quality metrics for the shape-regularity assumption."""

from __future__ import annotations

import numpy as np

from .core import Mesh


def _side_lengths(mesh: Mesh) -> np.ndarray:
    c = mesh.corners
    return np.stack(
        [
            np.linalg.norm(c[:, 2] - c[:, 1], axis=1),
            np.linalg.norm(c[:, 0] - c[:, 2], axis=1),
            np.linalg.norm(c[:, 1] - c[:, 0], axis=1),
        ],
        axis=1,
    )


def min_angle(mesh: Mesh) -> float:
    """Smallest interior angle over all triangles, in degrees."""
    a = _side_lengths(mesh)
    angles = []
    for k in range(3):
        opp = a[:, k]
        s1 = a[:, (k + 1) % 3]
        s2 = a[:, (k + 2) % 3]
        cos = np.clip((s1**2 + s2**2 - opp**2) / (2.0 * s1 * s2), -1.0, 1.0)
        angles.append(np.degrees(np.arccos(cos)))
    return float(np.min(angles))


def shape_regularity(mesh: Mesh) -> float:
    """max_K h_K / rho_K with h_K the longest side and rho_K the inradius."""
    a = _side_lengths(mesh)
    inradius = 2.0 * mesh.areas / a.sum(axis=1)
    return float(np.max(a.max(axis=1) / inradius))
