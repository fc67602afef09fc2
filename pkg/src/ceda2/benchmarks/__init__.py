"""Benchmark problem library: the 20-function niching suite plus the two
shifted-rotated study functions, addressable by string id.
"""

from __future__ import annotations

import re

from .composition import (
    make_composition,
    make_recipe_composition,
    seeded_rotation,
    seeded_shifts,
)
from .functions import (
    make_f1,
    make_f2,
    make_f3,
    make_f4,
    make_f5,
    make_f6,
    make_f7,
    make_f8,
    make_f9,
    make_f10,
)
from .problem import (
    BudgetExhausted,
    EvalBudget,
    Problem,
    default_niche_radius,
    evaluate,
)
from .study import make_cec2005_study_problem

__all__ = [
    "Problem",
    "EvalBudget",
    "BudgetExhausted",
    "evaluate",
    "default_niche_radius",
    "make_cec2013_problem",
    "make_composition",
    "make_recipe_composition",
    "make_cec2005_study_problem",
    "seeded_rotation",
    "seeded_shifts",
    "get_problem",
]

# seeds for the composition instances are fixed so every run of the suite
# sees identical geometry
COMPOSITION_SEED_BASE = 20130000

# id -> (recipe, dimension, MaxFEs) for the composition half of the suite
_COMPOSITION_ROWS = {
    11: ("cf1", 2, 200_000),
    12: ("cf2", 2, 200_000),
    13: ("cf3", 2, 200_000),
    14: ("cf3", 3, 400_000),
    15: ("cf4", 3, 400_000),
    16: ("cf3", 5, 400_000),
    17: ("cf4", 5, 400_000),
    18: ("cf3", 10, 400_000),
    19: ("cf4", 10, 400_000),
    20: ("cf4", 20, 400_000),
}

_CLOSED_FORM_FACTORIES = {
    1: make_f1,
    2: make_f2,
    3: make_f3,
    4: make_f4,
    5: make_f5,
    6: make_f6,
    7: make_f7,
    8: make_f8,
    9: make_f9,
    10: make_f10,
}


def make_cec2013_problem(id: int) -> Problem:
    """Construct suite function 1..20 with its standard dimension and budget."""
    if id in _CLOSED_FORM_FACTORIES:
        return _CLOSED_FORM_FACTORIES[id]()
    if id in _COMPOSITION_ROWS:
        kind, dimension, max_fes = _COMPOSITION_ROWS[id]
        return make_recipe_composition(
            kind,
            dimension,
            seed=COMPOSITION_SEED_BASE + id,
            name=f"composition-f{id}",
            max_fes=max_fes,
        )
    raise ValueError(f"suite function id must be 1..20, got {id}")


_STUDY_ID = re.compile(r"^study/(elliptic|rosenbrock)-d(\d+)$")
_SUITE_ID = re.compile(r"^cec2013/f(\d+)$")


def get_problem(problem_id: str) -> Problem:
    """Resolve a string id like "cec2013/f7" or "study/elliptic-d20"."""
    m = _SUITE_ID.match(problem_id)
    if m:
        return make_cec2013_problem(int(m.group(1)))
    m = _STUDY_ID.match(problem_id)
    if m:
        return make_cec2005_study_problem(m.group(1), int(m.group(2)))
    raise ValueError(f"unknown problem id: {problem_id!r}")
