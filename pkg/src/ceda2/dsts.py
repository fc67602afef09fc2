"""Adaptive clustering by fitness rank and relative distance.

Solutions are ordered from worst to best; each solution's relative distance
is the Euclidean distance to its nearest strictly-better solution, the best
solution inheriting the maximum of the others.  Solutions whose relative
distance exceeds an adaptive threshold become cluster centers (they are far
from anything better, so they sit on their own peak); everything else joins
the cluster of its nearest better neighbour, chasing the chain uphill.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .core import MAXIMIZE, check_sense


@dataclass(frozen=True)
class ClusteringInput:
    points: np.ndarray  # (m, d)
    fitness: np.ndarray  # (m,)
    sense: str
    alpha: float

    def __post_init__(self) -> None:
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        fitness = np.asarray(self.fitness, dtype=float)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "fitness", fitness)
        check_sense(self.sense)
        if points.shape[0] < 1:
            raise ValueError("need at least one point")
        if fitness.shape != (points.shape[0],):
            raise ValueError("fitness must align with points")
        if not np.all(np.isfinite(fitness)):
            raise ValueError("fitness must be finite")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class ClusteringResult:
    centers: list[int]  # point indices; a center's cluster id is its own index
    labels: np.ndarray  # (m,) cluster id per point
    deltas: np.ndarray  # (m,) relative distance per point
    threshold: float


def strict_fitness_order(fitness: np.ndarray, sense: str) -> np.ndarray:
    """Total order from worst to best; exact ties rank the lower index worse."""
    check_sense(sense)
    fitness = np.asarray(fitness, dtype=float)
    key = fitness if sense == MAXIMIZE else -fitness
    return np.argsort(key, kind="stable")


def relative_distances(input: ClusteringInput, order: np.ndarray) -> np.ndarray:
    """Distance from each solution to its nearest strictly-better one.

    "Better" means later in the supplied total order.  The single best
    solution gets the maximum of the other distances; a lone point gets 1.
    """
    m = len(input)
    if m == 1:
        return np.array([1.0])
    ordered = input.points[order]
    dist = cdist(ordered, ordered)
    deltas_ordered = np.empty(m)
    for k in range(m - 1):
        deltas_ordered[k] = dist[k, k + 1 :].min()
    deltas_ordered[m - 1] = deltas_ordered[: m - 1].max()
    deltas = np.empty(m)
    deltas[order] = deltas_ordered
    return deltas


def threshold_and_centers(
    deltas: np.ndarray, alpha: float, order: np.ndarray | None = None
) -> tuple[float, list[int]]:
    """Threshold alpha * (max - min) of the deltas; centers exceed it strictly.

    All-equal deltas give threshold 0, so every point with positive delta is a
    center.  If every delta is 0 (all points coincide) the single best
    solution is the only center, which needs the order to identify; without
    it that degenerate input is rejected.
    """
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size == 0:
        raise ValueError("deltas must be non-empty")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    threshold = alpha * (deltas.max() - deltas.min())
    centers = [int(i) for i in np.flatnonzero(deltas > threshold)]
    if not centers:
        # deltas all zero: coincident points collapse to one cluster at the best
        if order is None:
            raise ValueError(
                "all deltas are zero; pass the fitness order to pick the center"
            )
        centers = [int(order[-1])]
    return float(threshold), centers


def assign_members(
    input: ClusteringInput, order: np.ndarray, centers: list[int]
) -> np.ndarray:
    """Label every solution with the cluster of its nearest better neighbour.

    Processes solutions from best to worst so the nearest strictly-better
    solution is labeled before anyone points at it.  Distance ties pick the
    better-ranked neighbour.  The best solution must be a center (nothing is
    better, so it has nowhere to chain to).
    """
    if not centers:
        raise ValueError("centers must be non-empty")
    m = len(input)
    ranks = np.empty(m, dtype=int)
    ranks[order] = np.arange(m)
    center_set = set(centers)
    if int(order[-1]) not in center_set:
        raise ValueError("the best solution must be among the centers")
    dist = cdist(input.points, input.points)
    labels = np.full(m, -1, dtype=int)
    for k in range(m - 1, -1, -1):
        i = int(order[k])
        if i in center_set:
            labels[i] = i
            continue
        better = order[k + 1 :]
        d = dist[i, better]
        # primary key: distance; secondary: higher rank (better solution) wins ties
        pick = better[np.lexsort((-ranks[better], d))[0]]
        labels[i] = labels[int(pick)]
    return labels


def cluster(input: ClusteringInput) -> ClusteringResult:
    """Full pipeline: order, relative distances, centers, member assignment."""
    order = strict_fitness_order(input.fitness, input.sense)
    deltas = relative_distances(input, order)
    threshold, centers = threshold_and_centers(deltas, input.alpha, order)
    labels = assign_members(input, order, centers)
    return ClusteringResult(
        centers=centers, labels=labels, deltas=deltas, threshold=threshold
    )
