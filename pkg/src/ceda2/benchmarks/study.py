"""Shifted, rotated unimodal study functions (minimization).

These two are the convergence workhorses for the population-size and
archive-length sweeps: a quadratic with condition number 10^6 and the
Rosenbrock valley.  Geometry (shift vector, rotation matrix) is seeded,
not loaded from fixed tables; the reproduction target is the conditioning
and non-separability, not any specific historical instance.
"""

from __future__ import annotations

import numpy as np

from .composition import seeded_rotation
from .problem import Problem

DEFAULT_STUDY_SEED = 20050000
ELLIPTIC_CONDITION = 1e6
STUDY_BOUND = 100.0
SHIFT_RANGE = 80.0  # shifts stay well inside the box
STUDY_MAX_FES = 200_000


def make_cec2005_study_problem(
    which: str, dimension: int, seed: int = DEFAULT_STUDY_SEED
) -> Problem:
    """Build the elliptic or rosenbrock study problem at the given dimension.

    Elliptic: f(x) = sum_i cond^((i-1)/(D-1)) * z_i^2 with z = M (x - s);
    optimum at the shift point s.  Rosenbrock: f(x) = classic valley on
    z = M (x - s); the optimum sits at x* = s + M^T 1 (where z = 1), which
    reduces to the textbook all-ones point for zero shift and identity
    rotation.  Both have optimum value 0.
    """
    if dimension < 2:
        raise ValueError("dimension must be at least 2")
    rng = np.random.default_rng(seed)
    shift = rng.uniform(-SHIFT_RANGE, SHIFT_RANGE, dimension)
    rotation = seeded_rotation(dimension, rng)
    bounds = np.tile(np.array([-STUDY_BOUND, STUDY_BOUND]), (dimension, 1))

    if which == "elliptic":
        exponents = np.arange(dimension) / (dimension - 1)
        coefficients = ELLIPTIC_CONDITION**exponents

        def func(x: np.ndarray) -> float:
            z = rotation @ (x - shift)
            return float(coefficients @ (z * z))

        optimum = shift
    elif which == "rosenbrock":

        def func(x: np.ndarray) -> float:
            z = rotation @ (x - shift)
            head = z[:-1]
            tail = z[1:]
            return float(
                np.sum(100.0 * (head * head - tail) ** 2 + (head - 1.0) ** 2)
            )

        optimum = shift + rotation.T @ np.ones(dimension)
    else:
        raise ValueError(f"unknown study function: {which!r}")

    return Problem(
        name=f"{which}-d{dimension}",
        dimension=dimension,
        bounds=bounds,
        sense="minimize",
        func=func,
        global_optimum_value=0.0,
        global_optima=optimum[None, :],
        niche_radius=STUDY_BOUND,
        max_fes=STUDY_MAX_FES,
    )
