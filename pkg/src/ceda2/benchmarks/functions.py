"""Closed-form multimodal test functions (the classic niching suite, f1-f10).

All functions are maximized.  Optima coordinates below are frozen at machine
precision (Newton-refined stationary points); the larger Shubert and Vincent
optima lists live in the optima/ data directory, regenerated by
scripts/generate_optima.py.
"""

from __future__ import annotations

import math
from importlib import resources

import numpy as np

from .problem import Problem, default_niche_radius

TWO_PI = 2.0 * math.pi

# ----------------------------------------------------------------------
# raw objective functions (genome -> float, maximization sense)
# ----------------------------------------------------------------------


def five_uneven_peak_trap(x: np.ndarray) -> float:
    v = float(x[0])
    if v < 2.5:
        return 80.0 * (2.5 - v)
    if v < 5.0:
        return 64.0 * (v - 2.5)
    if v < 7.5:
        return 64.0 * (7.5 - v)
    if v < 12.5:
        return 28.0 * (v - 7.5)
    if v < 17.5:
        return 28.0 * (17.5 - v)
    if v < 22.5:
        return 32.0 * (v - 17.5)
    if v < 27.5:
        return 32.0 * (27.5 - v)
    return 80.0 * (v - 27.5)


def equal_maxima(x: np.ndarray) -> float:
    return math.sin(5.0 * math.pi * float(x[0])) ** 6


def uneven_decreasing_maxima(x: np.ndarray) -> float:
    v = float(x[0])
    envelope = math.exp(-2.0 * math.log(2.0) * ((v - 0.08) / 0.854) ** 2)
    return envelope * math.sin(5.0 * math.pi * (v**0.75 - 0.05)) ** 6


def himmelblau(x: np.ndarray) -> float:
    a, b = float(x[0]), float(x[1])
    return 200.0 - (a * a + b - 11.0) ** 2 - (a + b * b - 7.0) ** 2


def six_hump_camel_back(x: np.ndarray) -> float:
    a, b = float(x[0]), float(x[1])
    return -(
        (4.0 - 2.1 * a * a + (a**4) / 3.0) * a * a
        + a * b
        + (4.0 * b * b - 4.0) * b * b
    )


def shubert(x: np.ndarray) -> float:
    # product over dimensions of sum_{j=1..5} j*cos((j+1)*x_i + j), negated
    product = 1.0
    for v in x:
        v = float(v)
        product *= (
            1.0 * math.cos(2.0 * v + 1.0)
            + 2.0 * math.cos(3.0 * v + 2.0)
            + 3.0 * math.cos(4.0 * v + 3.0)
            + 4.0 * math.cos(5.0 * v + 4.0)
            + 5.0 * math.cos(6.0 * v + 5.0)
        )
    return -product


def vincent(x: np.ndarray) -> float:
    total = 0.0
    for v in x:
        total += math.sin(10.0 * math.log(float(v)))
    return total / len(x)


def modified_rastrigin(x: np.ndarray, k=(3.0, 4.0)) -> float:
    total = 0.0
    for v, ki in zip(x, k):
        total += 10.0 + 9.0 * math.cos(TWO_PI * ki * float(v))
    return -total


# ----------------------------------------------------------------------
# frozen optima
# ----------------------------------------------------------------------

UNEVEN_DECREASING_OPTIMUM = 0.07969977957780018
UNEVEN_DECREASING_VALUE = 0.9999998284544724

HIMMELBLAU_OPTIMA = np.array(
    [
        [3.0, 2.0],
        [-2.805118086952745, 3.131312518250573],
        [-3.779310253377747, -3.283185991286169],
        [3.5844283403304917, -1.8481265269644034],
    ]
)

SIX_HUMP_GLOBAL_OPTIMA = np.array(
    [
        [0.08984201310031807, -0.7126564030207396],
        [-0.08984201310031807, 0.7126564030207396],
    ]
)
SIX_HUMP_GLOBAL_VALUE = 1.0316284534898774

# the two secondary peaks complete the four basins the clustering demo targets
SIX_HUMP_LOCAL_OPTIMA = np.array(
    [
        [1.7036067149699814, -0.7960835686726251],
        [-1.7036067149699814, 0.7960835686726251],
    ]
)
SIX_HUMP_LOCAL_VALUE = 0.2154638243837177

SHUBERT_2D_VALUE = 186.73090883102378
SHUBERT_3D_VALUE = 2709.0935055728264

# Vincent peaks per axis: sin(10*ln(x)) = 1 at x = exp((pi/2 + 2*pi*k)/10)
VINCENT_PEAKS_1D = np.exp((np.pi / 2.0 + TWO_PI * np.arange(-2, 4)) / 10.0)

MODIFIED_RASTRIGIN_K = (3.0, 4.0)
MODIFIED_RASTRIGIN_VALUE = -2.0


def _load_optima(filename: str) -> np.ndarray:
    path = resources.files("ceda2.benchmarks") / "optima" / filename
    with resources.as_file(path) as fp:
        return np.loadtxt(fp, ndmin=2)


def _grid_optima(axes: list[np.ndarray]) -> np.ndarray:
    # cartesian product of per-axis peak positions
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


# ----------------------------------------------------------------------
# problem factories
# ----------------------------------------------------------------------


def _box(low, high, dimension: int) -> np.ndarray:
    return np.tile(np.array([low, high], dtype=float), (dimension, 1))


def _problem(name, func, bounds, optima, value, max_fes) -> Problem:
    bounds = np.asarray(bounds, dtype=float)
    optima = np.atleast_2d(np.asarray(optima, dtype=float))
    return Problem(
        name=name,
        dimension=bounds.shape[0],
        bounds=bounds,
        sense="maximize",
        func=func,
        global_optimum_value=value,
        global_optima=optima,
        niche_radius=default_niche_radius(optima, bounds),
        max_fes=max_fes,
    )


def make_f1() -> Problem:
    return _problem(
        "five-uneven-peak-trap",
        five_uneven_peak_trap,
        _box(0.0, 30.0, 1),
        [[0.0], [30.0]],
        200.0,
        50_000,
    )


def make_f2() -> Problem:
    peaks = [[0.1], [0.3], [0.5], [0.7], [0.9]]
    return _problem("equal-maxima", equal_maxima, _box(0.0, 1.0, 1), peaks, 1.0, 50_000)


def make_f3() -> Problem:
    return _problem(
        "uneven-decreasing-maxima",
        uneven_decreasing_maxima,
        _box(0.0, 1.0, 1),
        [[UNEVEN_DECREASING_OPTIMUM]],
        UNEVEN_DECREASING_VALUE,
        50_000,
    )


def make_f4() -> Problem:
    return _problem(
        "himmelblau", himmelblau, _box(-6.0, 6.0, 2), HIMMELBLAU_OPTIMA, 200.0, 50_000
    )


def make_f5() -> Problem:
    bounds = np.array([[-1.9, 1.9], [-1.1, 1.1]])
    return _problem(
        "six-hump-camel-back",
        six_hump_camel_back,
        bounds,
        SIX_HUMP_GLOBAL_OPTIMA,
        SIX_HUMP_GLOBAL_VALUE,
        50_000,
    )


def make_f6() -> Problem:
    return _problem(
        "shubert-2d",
        shubert,
        _box(-10.0, 10.0, 2),
        _load_optima("shubert2d.txt"),
        SHUBERT_2D_VALUE,
        200_000,
    )


def make_f7() -> Problem:
    return _problem(
        "vincent-2d",
        vincent,
        _box(0.25, 10.0, 2),
        _load_optima("vincent2d.txt"),
        1.0,
        200_000,
    )


def make_f8() -> Problem:
    return _problem(
        "shubert-3d",
        shubert,
        _box(-10.0, 10.0, 3),
        _load_optima("shubert3d.txt"),
        SHUBERT_3D_VALUE,
        400_000,
    )


def make_f9() -> Problem:
    return _problem(
        "vincent-3d",
        vincent,
        _box(0.25, 10.0, 3),
        _load_optima("vincent3d.txt"),
        1.0,
        400_000,
    )


def make_f10() -> Problem:
    axes = [
        (2.0 * np.arange(k) + 1.0) / (2.0 * k) for k in MODIFIED_RASTRIGIN_K
    ]
    return _problem(
        "modified-rastrigin-2d",
        modified_rastrigin,
        _box(0.0, 1.0, 2),
        _grid_optima(axes),
        MODIFIED_RASTRIGIN_VALUE,
        200_000,
    )
