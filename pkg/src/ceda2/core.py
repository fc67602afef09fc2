"""Shared plumbing: individuals, optimization sense, and evaluation budgets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAXIMIZE = "maximize"
MINIMIZE = "minimize"


def check_sense(sense: str) -> str:
    if sense not in (MAXIMIZE, MINIMIZE):
        raise ValueError(f"unknown sense: {sense!r}")
    return sense


def is_better(a: float, b: float, sense: str) -> bool:
    """True iff fitness a is strictly better than b under sense."""
    return a > b if sense == MAXIMIZE else a < b


def fitness_key(sense: str):
    """Sort key on fitness such that ascending order runs worst to best."""
    if sense == MAXIMIZE:
        return lambda f: f
    return lambda f: -f


@dataclass
class Individual:
    """A candidate solution: genome plus cached evaluation.

    fitness is None until evaluated; eval_index records the budget count
    at the moment of evaluation (1-based), used as a deterministic
    tie-breaker (lower index = evaluated earlier).
    """

    genome: np.ndarray
    fitness: float | None = None
    eval_index: int | None = None

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested past the FE budget."""


@dataclass
class EvalBudget:
    """Counts function evaluations against a hard cap.

    spend() must be called exactly once per objective evaluation.
    """

    max_fes: int
    used: int = 0

    def __post_init__(self) -> None:
        if self.max_fes < 1:
            raise ValueError("max_fes must be positive")

    @property
    def remaining(self) -> int:
        return self.max_fes - self.used

    def spend(self) -> int:
        """Consume one evaluation; returns the new count (1-based)."""
        if self.used >= self.max_fes:
            raise BudgetExhausted(f"budget of {self.max_fes} FEs exhausted")
        self.used += 1
        return self.used


def best_individual(individuals, sense: str) -> Individual:
    """Best evaluated individual; fitness ties broken by lower eval_index."""
    pool = [ind for ind in individuals if ind.evaluated]
    if not pool:
        raise ValueError("no evaluated individuals")
    best = pool[0]
    for ind in pool[1:]:
        if is_better(ind.fitness, best.fitness, sense) or (
            ind.fitness == best.fitness
            and (ind.eval_index or 0) < (best.eval_index or 0)
        ):
            best = ind
    return best
