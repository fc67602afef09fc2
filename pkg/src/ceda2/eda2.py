"""The archive-based Gaussian EDA loop.

Each generation keeps the best ~third of the population, fits a Gaussian
whose mean comes from that selected set and whose covariance pools the
selected set with the last few generations' selections (the archive), then
samples the next population from the model and carries the best-so-far
solution forward unchanged.  The archive is what keeps the covariance from
collapsing prematurely: it stretches the model along the recent direction
of travel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BudgetExhausted,
    EvalBudget,
    Individual,
    check_sense,
    fitness_key,
    is_better,
)
from .gaussian_model import (
    Archive,
    DegenerateModelError,
    SelectedSet,
    archive_push,
    build_model,
    estimate_covariance_with_archive,
    estimate_mean,
    sample,
)

# Guards against 0.35 * 20 == 6.999999... style floating artifacts.
FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class Eda2Params:
    population_size: int  # p
    selection_ratio: float  # tau
    archive_length: int  # l
    sense: str = "minimize"

    def __post_init__(self) -> None:
        check_sense(self.sense)
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not 0.0 < self.selection_ratio < 1.0:
            raise ValueError("selection_ratio must lie in (0, 1)")
        if self.archive_length < 0:
            raise ValueError("archive_length must be nonnegative")
        if selection_count(self.population_size, self.selection_ratio) < 1:
            raise ValueError("floor(ratio * population_size) must be at least 1")


@dataclass(frozen=True)
class TerminationPolicy:
    max_fes: int  # cap on evaluations charged to this run
    stagnation_window: int = 5
    stagnation_accuracy: float = 0.0
    stagnation_enabled: bool = False

    def __post_init__(self) -> None:
        if self.max_fes < 1:
            raise ValueError("max_fes must be positive")
        if self.stagnation_window < 1:
            raise ValueError("stagnation_window must be at least 1")
        if self.stagnation_accuracy < 0:
            raise ValueError("stagnation_accuracy must be nonnegative")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    fes_used: int
    best_fitness: float
    median_fitness: float
    mean_fitness: float


@dataclass
class Eda2Result:
    best: Individual | None  # None only when the budget was exhausted on entry
    fes_used: int
    generations: int
    history: list[GenerationRecord] = field(default_factory=list)


def selection_count(population_size: int, ratio: float) -> int:
    return int(math.floor(ratio * population_size + FLOOR_GUARD))


def truncation_select(
    population: list[Individual], ratio: float, sense: str, generation: int = 0
) -> SelectedSet:
    """Keep the best floor(ratio * population size) individuals.

    Fitness ties are broken by lower eval_index (older first) so selection
    is deterministic.
    """
    check_sense(sense)
    if not population:
        raise ValueError("population must be non-empty")
    if any(not ind.evaluated for ind in population):
        raise ValueError("population must be fully evaluated")
    k = selection_count(len(population), ratio)
    if k < 1:
        raise ValueError("selection would keep zero individuals")
    key = fitness_key(sense)
    ranked = sorted(
        population, key=lambda ind: (-key(ind.fitness), ind.eval_index or 0)
    )
    return SelectedSet(members=ranked[:k], generation=generation)


def bound_repair(
    x: np.ndarray, bounds: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Redraw each out-of-range coordinate uniformly within its bound."""
    low = bounds[:, 0]
    high = bounds[:, 1]
    out = (x < low) | (x > high)
    if not out.any():
        return x
    repaired = x.copy()
    repaired[out] = rng.uniform(low[out], high[out])
    return repaired


def stagnation_check(
    medians: list[float], window: int, accuracy: float, sense: str
) -> bool:
    """True iff the median improved by less than accuracy over the window.

    The improvement is measured in the sense direction between generations
    t-window and t; the comparison is strict, so exactly-accuracy progress
    does not stagnate.  Insufficient history returns False.
    """
    check_sense(sense)
    if len(medians) < window + 1:
        return False
    now = medians[-1]
    then = medians[-1 - window]
    improvement = now - then if sense == "maximize" else then - now
    return improvement < accuracy


def median_run_settled(
    medians: list[float], window: int, accuracy: float, sense: str
) -> bool:
    """True iff every one-generation median improvement in the last `window`
    steps is strictly below accuracy.

    This is the all-quiet form of the stagnation rule: a single generation
    of real progress anywhere in the window keeps the run alive.  Requiring
    the whole window to be quiet makes the stop insensitive to the heavy
    generation-to-generation noise of small populations, which would
    otherwise halt cluster runs long before they finish refining a peak.
    """
    if len(medians) < window + 1:
        return False
    return all(
        stagnation_check(medians[: len(medians) - window + i + 1], 1, accuracy, sense)
        for i in range(window)
    )


def run_eda2(
    objective,
    bounds: np.ndarray,
    params: Eda2Params,
    termination: TerminationPolicy,
    rng: np.random.Generator,
    init: list[Individual] | None = None,
    budget: EvalBudget | None = None,
) -> Eda2Result:
    """Run the full loop until the budget, the termination policy, or a
    degenerate model stops it.

    objective maps a genome to a fitness value; every call is charged to the
    budget (shared with other runs when supplied).  init may hold any number
    of individuals, evaluated or not: when its size differs from the
    population size, generation 0 fits the model on ALL init members with no
    truncation (this is how cluster members seed a run), after which the
    population size is p throughout.  The best individual is carried into
    each new population unchanged and never re-evaluated.
    """
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2:
        raise ValueError("bounds must have shape (n, 2)")
    if np.any(bounds[:, 0] >= bounds[:, 1]):
        raise ValueError("bounds must satisfy low < high")
    n = bounds.shape[0]
    if budget is None:
        budget = EvalBudget(termination.max_fes)

    p = params.population_size
    sense = params.sense
    fes_start = budget.used
    fes_cap = termination.max_fes

    def run_fes() -> int:
        return budget.used - fes_start

    def evaluate(genome: np.ndarray) -> Individual:
        # raises BudgetExhausted; run-local cap raises the same signal
        if run_fes() >= fes_cap:
            raise BudgetExhausted(f"run cap of {fes_cap} FEs reached")
        index = budget.spend()
        return Individual(genome=genome, fitness=float(objective(genome)), eval_index=index)

    history: list[GenerationRecord] = []
    medians: list[float] = []
    best: Individual | None = None
    generation = 0

    def result() -> Eda2Result:
        return Eda2Result(
            best=best, fes_used=run_fes(), generations=generation, history=history
        )

    # --- initial population ---------------------------------------------
    population: list[Individual] = []
    seeded = init is not None and len(init) > 0
    try:
        if seeded:
            for ind in init:
                if ind.evaluated:
                    population.append(ind)
                else:
                    population.append(evaluate(ind.genome))
        else:
            for _ in range(p):
                genome = rng.uniform(bounds[:, 0], bounds[:, 1], size=n)
                population.append(evaluate(genome))
    except BudgetExhausted:
        if not population:
            return result()
        # fall through with the partial population; the loop below exits
        # on its first evaluation attempt

    for ind in population:
        if best is None or is_better(ind.fitness, best.fitness, sense):
            best = ind

    # --- generation loop --------------------------------------------------
    archive = Archive(capacity=params.archive_length)
    while True:
        fits = np.array([ind.fitness for ind in population])
        median = float(np.median(fits))
        medians.append(median)
        history.append(
            GenerationRecord(
                generation=generation,
                fes_used=run_fes(),
                best_fitness=best.fitness,
                median_fitness=median,
                mean_fitness=float(fits.mean()),
            )
        )
        if termination.stagnation_enabled and median_run_settled(
            medians,
            termination.stagnation_window,
            termination.stagnation_accuracy,
            sense,
        ):
            break
        if run_fes() >= fes_cap or budget.remaining <= 0:
            break

        if generation == 0 and seeded and len(population) != p:
            selected = SelectedSet(members=list(population), generation=0)
        else:
            selected = truncation_select(
                population, params.selection_ratio, sense, generation=generation
            )
        mean = estimate_mean(selected)
        covariance = estimate_covariance_with_archive(selected, archive, mean)
        archive = archive_push(archive, selected)
        try:
            model = build_model(mean, covariance)
        except DegenerateModelError:
            break

        elite = best
        offspring: list[Individual] = []
        exhausted = False
        genomes = sample(model, p - 1, rng)
        for genome in genomes:
            try:
                offspring.append(evaluate(bound_repair(genome, bounds, rng)))
            except BudgetExhausted:
                exhausted = True
                break
        for ind in offspring:
            if is_better(ind.fitness, best.fitness, sense):
                best = ind
        if exhausted:
            break
        population = offspring + [elite]
        generation += 1

    return result()
