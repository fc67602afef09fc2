"""Regenerate the stored global-optima tables for the Shubert and Vincent
problems (optima/*.txt, one vector per line, space-separated).

The 2-D lists come from a dense-grid scan followed by local refinement of
every near-maximal grid peak.  The 3-D lists exploit the per-axis structure
of both functions (a product of identical 1-D factors for Shubert, a mean of
identical 1-D terms for Vincent): the same grid + refinement oracle is
applied to the 1-D factor and the axis extremes are composed, which is
exact and avoids a billion-point 3-D scan.  Every composed point is
verified against the objective before writing.

Run from the repository root:  python scripts/generate_optima.py
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from ceda2.benchmarks.functions import (  # noqa: E402
    SHUBERT_2D_VALUE,
    SHUBERT_3D_VALUE,
    VINCENT_PEAKS_1D,
    shubert,
    vincent,
)

OUT_DIR = ROOT / "src" / "ceda2" / "benchmarks" / "optima"
GRID_N = 2000


def grid_local_maxima(func, lows, highs, n=GRID_N, keep_above=None):
    """Grid-scan a 2-D function and return local-maximum points worth refining."""
    xs = np.linspace(lows[0], highs[0], n)
    ys = np.linspace(lows[1], highs[1], n)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    values = np.empty((n, n))
    for i in range(n):
        row = np.stack([gx[i], gy[i]], axis=1)
        values[i] = [func(p) for p in row]
    interior = values[1:-1, 1:-1]
    mask = np.ones_like(interior, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= interior >= values[1 + di : n - 1 + di, 1 + dj : n - 1 + dj]
    ii, jj = np.nonzero(mask)
    points = np.stack([xs[ii + 1], ys[jj + 1]], axis=1)
    vals = interior[mask]
    if keep_above is not None:
        points = points[vals > keep_above]
    return points


def refine(func, x0, bounds):
    res = minimize(
        lambda p: -func(p),
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-13, "fatol": 1e-14, "maxiter": 5000},
    )
    p = np.clip(res.x, bounds[0], bounds[1])
    return p, func(p)


def dedupe(points, values, min_dist=1e-3):
    order = np.argsort(-values)
    kept_p, kept_v = [], []
    for idx in order:
        p = points[idx]
        if all(np.linalg.norm(p - q) >= min_dist for q in kept_p):
            kept_p.append(p)
            kept_v.append(values[idx])
    return np.array(kept_p), np.array(kept_v)


def scan_and_refine(func, lows, highs, keep_above, fitness_tol=1e-4):
    candidates = grid_local_maxima(func, lows, highs, keep_above=keep_above)
    refined = [refine(func, c, (lows, highs)) for c in candidates]
    points = np.array([p for p, _ in refined])
    values = np.array([v for _, v in refined])
    points, values = dedupe(points, values)
    best = values.max()
    near = values >= best - fitness_tol
    return points[near], best


def shubert_factor_extremes():
    """Newton-refined argmins/argmaxes of the 1-D Shubert factor on [-10, 10]."""

    def g(x):
        return sum(j * math.cos((j + 1) * x + j) for j in range(1, 6))

    def dg(x):
        return -sum(j * (j + 1) * math.sin((j + 1) * x + j) for j in range(1, 6))

    def ddg(x):
        return -sum(j * (j + 1) ** 2 * math.cos((j + 1) * x + j) for j in range(1, 6))

    xs = np.linspace(-10, 10, 2_000_001)
    ys = np.array([g(x) for x in xs])
    lo = np.nonzero((ys[1:-1] < ys[:-2]) & (ys[1:-1] < ys[2:]))[0] + 1
    hi = np.nonzero((ys[1:-1] > ys[:-2]) & (ys[1:-1] > ys[2:]))[0] + 1

    def newton(x):
        for _ in range(80):
            step = dg(x) / ddg(x)
            x -= step
            if abs(step) < 1e-16:
                break
        return x

    mins = np.array(sorted(newton(xs[i]) for i in lo))
    maxs = np.array(sorted(newton(xs[i]) for i in hi))
    gmin = min(g(x) for x in mins)
    gmax = max(g(x) for x in maxs)
    argmins = np.array([x for x in mins if abs(g(x) - gmin) < 1e-9])
    argmaxs = np.array([x for x in maxs if abs(g(x) - gmax) < 1e-9])
    assert len(argmins) == 3 and len(argmaxs) == 3
    return argmins, argmaxs, gmin, gmax


def write_table(name, points):
    points = points[np.lexsort(points.T[::-1])]  # deterministic row order
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    with open(OUT_DIR / name, "w") as fh:
        for row in points:
            fh.write(" ".join(f"{v:.16g}" for v in row) + "\n")
    print(f"wrote {name}: {points.shape[0]} optima")


def main():
    # ---- Shubert 2-D: full scan; second-tier peaks sit below 130, so
    # anything above 150 on the grid belongs to a global basin
    points, best = scan_and_refine(shubert, (-10, -10), (10, 10), keep_above=150.0)
    assert points.shape[0] == 18, points.shape
    assert abs(best - SHUBERT_2D_VALUE) < 1e-9, best
    write_table("shubert2d.txt", points)

    # ---- Vincent 2-D: every local maximum is global (value exactly 1)
    points, best = scan_and_refine(vincent, (0.25, 0.25), (10, 10), keep_above=0.9)
    assert points.shape[0] == 36, points.shape
    assert abs(best - 1.0) < 1e-12, best
    analytic = np.array(
        [[a, b] for a in VINCENT_PEAKS_1D for b in VINCENT_PEAKS_1D]
    )
    for target in analytic:
        gap = np.min(np.linalg.norm(points - target, axis=1))
        assert gap < 1e-6, (target, gap)
    write_table("vincent2d.txt", analytic)  # store the exact positions

    # ---- Shubert 3-D: product structure; the maximum of -g(x)g(y)g(z)
    # takes one factor at its minimum and two at the maximum
    argmins, argmaxs, gmin, gmax = shubert_factor_extremes()
    assert abs(-gmin * gmax * gmax - SHUBERT_3D_VALUE) < 1e-9
    rows = []
    for slot in range(3):
        for m in argmins:
            for a in argmaxs:
                for b in argmaxs:
                    row = np.empty(3)
                    row[slot] = m
                    row[[i for i in range(3) if i != slot]] = (a, b)
                    rows.append(row)
    points = np.array(rows)
    assert points.shape[0] == 81
    values = np.array([shubert(p) for p in points])
    assert np.max(np.abs(values - SHUBERT_3D_VALUE)) < 1e-9
    write_table("shubert3d.txt", points)

    # ---- Vincent 3-D: cross product of the per-axis peaks
    points = np.array(
        [
            [a, b, c]
            for a in VINCENT_PEAKS_1D
            for b in VINCENT_PEAKS_1D
            for c in VINCENT_PEAKS_1D
        ]
    )
    assert points.shape[0] == 216
    values = np.array([vincent(p) for p in points])
    assert np.max(np.abs(values - 1.0)) < 1e-12
    write_table("vincent3d.txt", points)


if __name__ == "__main__":
    main()
