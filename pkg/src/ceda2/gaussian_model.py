"""Multivariate Gaussian model estimation from selected and archived solutions.

The mean comes from the current selected set alone; the covariance pools the
selected set with an archive of the last few generations' selected sets, which
stretches the model along the recent direction of travel instead of collapsing
onto the current population.  All estimators use the biased divide-by-count
normalizer.  Models are regularized by a diagonal jitter ladder so that a
Cholesky factor always exists short of a truly collapsed population.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .core import Individual

LOG_2PI = float(np.log(2.0 * np.pi))

# Jitter ladder bounds: starting scale is relative to the covariance trace,
# each failed factorization multiplies by 10, past JITTER_CAP the model is
# declared degenerate.
JITTER_BASE = 1e-10
JITTER_CAP = 1e6
JITTER_GROWTH = 10.0


class DegenerateModelError(RuntimeError):
    """Covariance could not be factorized within the jitter ladder."""


@dataclass
class SelectedSet:
    """The solutions kept by one generation's truncation selection."""

    members: list[Individual]
    generation: int = 0

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("selected set must be non-empty")

    def __len__(self) -> int:
        return len(self.members)

    def genomes(self) -> np.ndarray:
        return np.array([ind.genome for ind in self.members], dtype=float)


@dataclass
class Archive:
    """FIFO window of the most recent selected sets, capped at capacity."""

    capacity: int
    sets: tuple[SelectedSet, ...] = ()

    def __post_init__(self) -> None:
        if self.capacity < 0:
            raise ValueError("capacity must be nonnegative")
        if len(self.sets) > self.capacity:
            raise ValueError("archive holds more sets than its capacity")

    def __len__(self) -> int:
        return len(self.sets)

    def member_count(self) -> int:
        return sum(len(s) for s in self.sets)

    def genomes(self) -> np.ndarray | None:
        if not self.sets:
            return None
        return np.concatenate([s.genomes() for s in self.sets], axis=0)


@dataclass(frozen=True)
class GaussianModel:
    """Mean, covariance, and a cached lower-triangular factor for sampling.

    factor @ factor.T equals covariance + jitter_applied * I.
    """

    mean: np.ndarray
    covariance: np.ndarray
    factor: np.ndarray
    jitter_applied: float


def estimate_mean(selected: SelectedSet) -> np.ndarray:
    """Coordinate-wise arithmetic mean of the selected genomes."""
    genomes = selected.genomes()
    return genomes.mean(axis=0)


def estimate_covariance(selected: SelectedSet, mean: np.ndarray) -> np.ndarray:
    """Biased scatter matrix of the selected genomes about the given mean."""
    genomes = selected.genomes()
    mean = np.asarray(mean, dtype=float)
    if mean.shape != (genomes.shape[1],):
        raise ValueError(
            f"mean dimension {mean.shape} does not match genomes {genomes.shape[1]}"
        )
    dev = genomes - mean
    return dev.T @ dev / genomes.shape[0]


def estimate_covariance_with_archive(
    selected: SelectedSet, archive: Archive, mean: np.ndarray
) -> np.ndarray:
    """Biased scatter of the pooled multiset (archive members + selected).

    The mean is still the one estimated from the selected set only; archive
    members enter the spread estimate but never shift the center.  Duplicate
    genomes across generations count with multiplicity.
    """
    pooled = selected.genomes()
    archived = archive.genomes()
    if archived is not None:
        if archived.shape[1] != pooled.shape[1]:
            raise ValueError(
                f"archived dimension {archived.shape[1]} does not match "
                f"selected dimension {pooled.shape[1]}"
            )
        pooled = np.concatenate([archived, pooled], axis=0)
    mean = np.asarray(mean, dtype=float)
    if mean.shape != (pooled.shape[1],):
        raise ValueError(
            f"mean dimension {mean.shape} does not match genomes {pooled.shape[1]}"
        )
    dev = pooled - mean
    return dev.T @ dev / pooled.shape[0]


def build_model(mean: np.ndarray, covariance: np.ndarray) -> GaussianModel:
    """Symmetrize, factorize, and if needed jitter the covariance.

    The jitter starts at JITTER_BASE * max(1, trace/n) and grows tenfold per
    failed factorization; exceeding JITTER_CAP raises DegenerateModelError,
    which callers treat as a normal termination event for the run.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(covariance, dtype=float)
    n = mean.shape[0]
    if cov.shape != (n, n):
        raise ValueError(f"covariance shape {cov.shape} does not match mean ({n},)")
    cov = (cov + cov.T) / 2.0

    try:
        factor = np.linalg.cholesky(cov)
        return GaussianModel(mean=mean, covariance=cov, factor=factor, jitter_applied=0.0)
    except np.linalg.LinAlgError:
        pass

    trace = float(np.trace(cov))
    eps = JITTER_BASE * max(1.0, trace / n)
    eye = np.eye(n)
    while eps <= JITTER_CAP:
        try:
            factor = np.linalg.cholesky(cov + eps * eye)
            return GaussianModel(
                mean=mean, covariance=cov, factor=factor, jitter_applied=eps
            )
        except np.linalg.LinAlgError:
            eps *= JITTER_GROWTH
    raise DegenerateModelError(
        f"covariance not factorizable with jitter up to {JITTER_CAP}"
    )


def sample(model: GaussianModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw count vectors x = mean + factor @ z, z standard normal.

    Returns an array of shape (count, n); deterministic for a seeded rng.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    n = model.mean.shape[0]
    z = rng.standard_normal((count, n))
    return model.mean + z @ model.factor.T


def log_density(model: GaussianModel, x: np.ndarray) -> float:
    """Log of the Gaussian density at x, using the regularized covariance.

    Computed from the cached factor: the log-determinant from its diagonal
    and the quadratic form from one triangular solve.
    """
    x = np.asarray(x, dtype=float)
    n = model.mean.shape[0]
    if x.shape != (n,):
        raise ValueError(f"x shape {x.shape} does not match model dimension {n}")
    y = solve_triangular(model.factor, x - model.mean, lower=True)
    log_det = 2.0 * float(np.sum(np.log(np.diag(model.factor))))
    return -0.5 * (n * LOG_2PI + log_det + float(y @ y))


def archive_push(archive: Archive, selected: SelectedSet) -> Archive:
    """Append a selected set, evicting the oldest once capacity is reached.

    Pure: returns a new Archive. Generation tags must be strictly increasing.
    """
    if archive.sets and selected.generation <= archive.sets[-1].generation:
        raise ValueError(
            f"generation {selected.generation} not newer than stored "
            f"{archive.sets[-1].generation}"
        )
    if archive.capacity == 0:
        return archive
    sets = archive.sets + (selected,)
    if len(sets) > archive.capacity:
        sets = sets[1:]
    return Archive(capacity=archive.capacity, sets=sets)
