"""Shared numerical tolerances and exit codes."""

from __future__ import annotations

# Reject triangles with area below this fraction of (longest edge)^2.
DEGENERACY_AREA_FACTOR = 1e-14

# Point-triangle pairs tested at once by locate.
LOCATE_BLOCK_PAIRS = 1 << 20

# Partition-of-unity denominators below this are reported as degenerate points.
POU_DENOMINATOR_MIN = 1e-12

# Relative eigenvalue / pivot cutoff for the symmetric solve.
SOLVE_TAU_DEFAULT = 1e-12

# 36 Gauss points per triangle, 6 per boundary edge.
TRIANGLE_POINTS_DEFAULT = 36
EDGE_POINTS_DEFAULT = 6
GAUSS_1D_MAX_POINTS = 64

# Monomial degree every triangle rule must integrate exactly for the self-test.
REQUIRED_EXACT_DEGREE = 5

# Adam defaults
LEARNING_RATE_DEFAULT = 3e-4
ADAM_BETA1_DEFAULT = 0.9
ADAM_BETA2_DEFAULT = 0.999
ADAM_EPS_DEFAULT = 1e-8

# CLI exit codes (stable contract)
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_SELF_TEST = 4
