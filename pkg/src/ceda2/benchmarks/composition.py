"""Seeded composition functions: blends of shifted, rotated basic functions.

A composition places n basic functions at n shift points and blends them
with Gaussian weights.  The weight trick below (scaling every non-maximal
weight by 1 - w_max^10) makes each shift point an exact global optimum of
the blend: at a shift point its own weight is 1 and all others vanish, so
the composition value is exactly the basic function's value at its own
optimum, i.e. 0.  Everywhere else the blend is strictly positive.  Problems
are exposed in maximization sense as -CF(x) with optimum value 0.

Shift points and rotation matrices are derived deterministically from a
seed instead of shipping fixed data tables, so optimum counts and structure
are reproducible but coordinates are this package's own.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .problem import Problem, default_niche_radius

BasicFunction = Callable[[np.ndarray], float]

NORMALIZATION_SCALE = 2000.0
ROTATION_ORTHO_TOL = 1e-10
SHIFT_MARGIN = 0.5
SHIFT_MIN_SEPARATION = 2.5

# ----------------------------------------------------------------------
# basic functions: each is >= 0 with a unique global minimum of 0 at z = 0
# ----------------------------------------------------------------------


def sphere(z: np.ndarray) -> float:
    return float(z @ z)


def griewank(z: np.ndarray) -> float:
    idx = np.arange(1.0, z.size + 1.0)
    return float(1.0 + z @ z / 4000.0 - np.prod(np.cos(z / np.sqrt(idx))))


def rastrigin(z: np.ndarray) -> float:
    return float(np.sum(z * z - 10.0 * np.cos(2.0 * math.pi * z) + 10.0))


_W_A = 0.5
_W_B = 3.0
_W_KMAX = 20
_W_AK = _W_A ** np.arange(_W_KMAX + 1)
_W_BK = _W_B ** np.arange(_W_KMAX + 1)
# constant chosen so the function is exactly 0 at z = 0 (same expression shape)
_W_CONST = float(np.cos(2.0 * math.pi * (0.5 * _W_BK)) @ _W_AK)


def weierstrass(z: np.ndarray) -> float:
    inner = np.cos(2.0 * math.pi * ((z[:, None] + 0.5) * _W_BK)) @ _W_AK
    return float(inner.sum() - z.size * _W_CONST)


def expanded_griewank_rosenbrock(z: np.ndarray) -> float:
    # cyclic pairs through the rosenbrock valley, each fed to griewank's bump
    a = z + 1.0
    b = np.roll(a, -1)
    r = 100.0 * (a * a - b) ** 2 + (1.0 - a) ** 2
    return float(np.sum(r * r / 4000.0 - np.cos(r) + 1.0))


# ----------------------------------------------------------------------
# seeded geometry
# ----------------------------------------------------------------------


def seeded_rotation(dimension: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal matrix from the QR decomposition of a random normal matrix."""
    q, r = np.linalg.qr(rng.standard_normal((dimension, dimension)))
    # fix the sign convention so the factorization is unique
    return q * np.sign(np.diag(r))


def seeded_shifts(
    count: int,
    dimension: int,
    rng: np.random.Generator,
    low: float,
    high: float,
    min_separation: float = SHIFT_MIN_SEPARATION,
) -> np.ndarray:
    """Uniform shift points inside the box, kept min_separation apart."""
    shifts: list[np.ndarray] = []
    attempts = 0
    while len(shifts) < count:
        candidate = rng.uniform(low + SHIFT_MARGIN, high - SHIFT_MARGIN, dimension)
        attempts += 1
        if attempts > 100_000:
            raise RuntimeError("could not place shift points this far apart")
        if all(np.linalg.norm(candidate - s) >= min_separation for s in shifts):
            shifts.append(candidate)
    return np.array(shifts)


# ----------------------------------------------------------------------
# the composition itself
# ----------------------------------------------------------------------


def make_composition(
    components: Sequence[BasicFunction],
    shifts: np.ndarray,
    rotations: Sequence[np.ndarray | None],
    lambdas: Sequence[float],
    sigmas: Sequence[float],
    normalizers: Sequence[float] | None = None,
    *,
    name: str = "composition",
    bounds: np.ndarray | None = None,
    max_fes: int = 200_000,
) -> Problem:
    """Build a composition Problem whose global optima are the shift points.

    lambdas stretch each component's basin, sigmas set the weight widths,
    and normalizers (optional) rescale component values to a common range
    as value -> NORMALIZATION_SCALE * value / |normalizer|.  With a single
    component, no shift, identity rotation, and unit lambda (and no
    normalizer) the composition equals that component.
    """
    shifts = np.atleast_2d(np.asarray(shifts, dtype=float))
    n, dim = shifts.shape
    if not (len(components) == len(rotations) == len(lambdas) == len(sigmas) == n):
        raise ValueError("component lists must all have one entry per shift")
    if normalizers is not None and len(normalizers) != n:
        raise ValueError("normalizers must have one entry per shift")
    mats = []
    for rot in rotations:
        if rot is None:
            mats.append(np.eye(dim))
            continue
        rot = np.asarray(rot, dtype=float)
        if rot.shape != (dim, dim) or np.max(np.abs(rot.T @ rot - np.eye(dim))) > ROTATION_ORTHO_TOL:
            raise ValueError("rotation matrices must be orthogonal")
        mats.append(rot)
    lambdas = np.asarray(lambdas, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    scales = None
    if normalizers is not None:
        scales = NORMALIZATION_SCALE / np.abs(np.asarray(normalizers, dtype=float))

    weight_denom = 2.0 * dim * sigmas**2

    def value(x: np.ndarray) -> float:
        diff = x - shifts  # (n, dim)
        sq = np.einsum("ij,ij->i", diff, diff)
        w = np.exp(-sq / weight_denom)
        fits = np.empty(n)
        for i in range(n):
            z = (diff[i] / lambdas[i]) @ mats[i]
            fits[i] = components[i](z)
        if scales is not None:
            fits = fits * scales
        wmax = w.max()
        w = np.where(w == wmax, w, w * (1.0 - wmax**10))
        w = w / w.sum()
        return float(w @ fits)

    def func(x: np.ndarray) -> float:
        return -value(x)

    if bounds is None:
        bounds = np.tile(np.array([-5.0, 5.0]), (dim, 1))
    return Problem(
        name=name,
        dimension=dim,
        bounds=bounds,
        sense="maximize",
        func=func,
        global_optimum_value=0.0,
        global_optima=shifts,
        niche_radius=default_niche_radius(shifts, bounds),
        max_fes=max_fes,
    )


# ----------------------------------------------------------------------
# the four standard recipes
# ----------------------------------------------------------------------

_RECIPES = {
    # kind: (components, lambdas, sigmas, rotated)
    "cf1": (
        [griewank, griewank, weierstrass, weierstrass, sphere, sphere],
        [1.0, 1.0, 8.0, 8.0, 1.0 / 5.0, 1.0 / 5.0],
        [1.0] * 6,
        False,
    ),
    "cf2": (
        [rastrigin, rastrigin, weierstrass, weierstrass, griewank, griewank, sphere, sphere],
        [1.0, 1.0, 10.0, 10.0, 1.0 / 10.0, 1.0 / 10.0, 1.0 / 7.0, 1.0 / 7.0],
        [1.0] * 8,
        False,
    ),
    "cf3": (
        [
            expanded_griewank_rosenbrock,
            expanded_griewank_rosenbrock,
            weierstrass,
            weierstrass,
            griewank,
            griewank,
        ],
        [1.0 / 4.0, 1.0 / 10.0, 2.0, 1.0, 2.0, 5.0],
        [1.0, 1.0, 2.0, 2.0, 2.0, 2.0],
        True,
    ),
    "cf4": (
        [
            rastrigin,
            rastrigin,
            expanded_griewank_rosenbrock,
            expanded_griewank_rosenbrock,
            weierstrass,
            weierstrass,
            griewank,
            griewank,
        ],
        [4.0, 1.0, 4.0, 1.0, 1.0 / 10.0, 2.0, 10.0, 2.0],
        [1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0],
        True,
    ),
}


def make_recipe_composition(
    kind: str,
    dimension: int,
    seed: int,
    *,
    name: str | None = None,
    max_fes: int = 200_000,
    low: float = -5.0,
    high: float = 5.0,
) -> Problem:
    """Instantiate one of the four standard recipes with seeded geometry."""
    if kind not in _RECIPES:
        raise ValueError(f"unknown composition recipe: {kind!r}")
    components, lambdas, sigmas, rotated = _RECIPES[kind]
    n = len(components)
    rng = np.random.default_rng(seed)
    shifts = seeded_shifts(n, dimension, rng, low, high)
    rotations: list[np.ndarray | None] = [
        seeded_rotation(dimension, rng) if rotated else None for _ in range(n)
    ]
    # normalizer: component value at the stretched box corner
    xmax = np.full(dimension, high)
    normalizers = []
    for i in range(n):
        mat = rotations[i] if rotations[i] is not None else np.eye(dimension)
        normalizers.append(components[i]((xmax / lambdas[i]) @ mat))
    return make_composition(
        components,
        shifts,
        rotations,
        lambdas,
        sigmas,
        normalizers,
        name=name or f"{kind}-d{dimension}",
        bounds=np.tile(np.array([low, high]), (dimension, 1)),
        max_fes=max_fes,
    )
