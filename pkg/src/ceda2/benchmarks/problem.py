"""Benchmark problem container and FE-counted evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial.distance import pdist

from ..core import BudgetExhausted, EvalBudget, check_sense

__all__ = [
    "Problem",
    "EvalBudget",
    "BudgetExhausted",
    "evaluate",
    "default_niche_radius",
]

OPTIMUM_CHECK_TOL = 1e-6


def default_niche_radius(optima: np.ndarray, bounds: np.ndarray) -> float:
    """Half the minimum pairwise distance between optima.

    With a single optimum there is nothing to separate, so fall back to
    half the smallest box edge.
    """
    if optima.shape[0] >= 2:
        return float(pdist(optima).min()) / 2.0
    return float((bounds[:, 1] - bounds[:, 0]).min()) / 2.0


@dataclass(frozen=True)
class Problem:
    """A benchmark function plus everything needed to score a run on it."""

    name: str
    dimension: int
    bounds: np.ndarray  # (dimension, 2) rows of [low, high]
    sense: str
    func: Callable[[np.ndarray], float]
    global_optimum_value: float
    global_optima: np.ndarray  # (n_optima, dimension)
    niche_radius: float
    max_fes: int

    def __post_init__(self) -> None:
        check_sense(self.sense)
        bounds = np.asarray(self.bounds, dtype=float)
        optima = np.atleast_2d(np.asarray(self.global_optima, dtype=float))
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "global_optima", optima)
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if bounds.shape != (self.dimension, 2):
            raise ValueError(f"bounds shape {bounds.shape} does not match dimension")
        if np.any(bounds[:, 0] >= bounds[:, 1]):
            raise ValueError("bounds must satisfy low < high")
        if optima.shape[1] != self.dimension:
            raise ValueError("optima dimension mismatch")
        if self.niche_radius <= 0:
            raise ValueError("niche_radius must be positive")
        if self.max_fes < 1:
            raise ValueError("max_fes must be positive")
        # construction self-check: every listed optimum is in the box and
        # actually attains the stated optimum value
        if np.any(optima < bounds[:, 0]) or np.any(optima > bounds[:, 1]):
            raise ValueError(f"{self.name}: an optimum lies outside the bounds")
        for point in optima:
            value = self.func(point)
            if abs(value - self.global_optimum_value) > OPTIMUM_CHECK_TOL:
                raise ValueError(
                    f"{self.name}: optimum {point} evaluates to {value}, "
                    f"expected {self.global_optimum_value}"
                )

    @property
    def n_optima(self) -> int:
        return self.global_optima.shape[0]


def evaluate(problem: Problem, x: np.ndarray, budget: EvalBudget) -> float:
    """Evaluate the objective at x, charging one FE to the budget."""
    budget.spend()
    return problem.func(np.asarray(x, dtype=float))
