"""Monte-Carlo ground truth for autocorrelation functions and moments.

The covariogram estimator of gamma(r) is the hit fraction of x + r*u with
x uniform in the solid and u isotropic.  All estimators are deterministic
functions of (seed, n_workers): worker streams are spawned from a single
``SeedSequence`` and partial results are combined in worker order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import SolidSpec, contains, sample_directions, sample_points

_CHUNK = 1 << 20


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class CurvePoint:
    """One (abscissa, value, stderr) record of a tabulated curve."""

    x: float
    value: float
    stderr: float


def _worker_streams(seed: int, n_workers: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(n_workers)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _split(n: int, k: int) -> list[int]:
    base, extra = divmod(n, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def estimate_cf(
    solid: SolidSpec, r: float, n: int, seed: int, n_workers: int = 1
) -> McEstimate:
    """Unbiased covariogram estimate of gamma(r) with binomial stderr."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if n < 1_000:
        raise ValueError("need at least 1e3 samples")
    if r == 0.0:
        return McEstimate(mean=1.0, stderr=0.0, n_samples=n, seed=seed)
    hits = 0
    for rng, n_i in zip(_worker_streams(seed, n_workers), _split(n, n_workers)):
        done = 0
        while done < n_i:
            m = min(_CHUNK, n_i - done)
            x = sample_points(solid, m, rng)
            u = sample_directions(m, rng)
            hits += int(np.count_nonzero(contains(solid, x + r * u)))
            done += m
    p = hits / n
    stderr = float(np.sqrt(p * (1.0 - p) / n))
    return McEstimate(mean=p, stderr=stderr, n_samples=n, seed=seed)


def estimate_rg2(
    solid: SolidSpec, n: int, seed: int, n_workers: int = 1
) -> McEstimate:
    """Mean squared distance from the sample centroid (gyration radius squared).

    Two passes over the same deterministic sample: the centroid first, then
    the second moment about it.
    """
    if n < 10_000:
        raise ValueError("need at least 1e4 samples")
    counts = _split(n, n_workers)

    centroid = np.zeros(3)
    for rng, n_i in zip(_worker_streams(seed, n_workers), counts):
        done = 0
        while done < n_i:
            m = min(_CHUNK, n_i - done)
            centroid += sample_points(solid, m, rng).sum(axis=0)
            done += m
    centroid /= n

    total = 0.0
    total_sq = 0.0
    for rng, n_i in zip(_worker_streams(seed, n_workers), counts):
        done = 0
        while done < n_i:
            m = min(_CHUNK, n_i - done)
            d2 = ((sample_points(solid, m, rng) - centroid) ** 2).sum(axis=1)
            total += float(d2.sum())
            total_sq += float((d2**2).sum())
            done += m
    mean = total / n
    var = max(total_sq / n - mean**2, 0.0)
    return McEstimate(
        mean=mean, stderr=float(np.sqrt(var / n)), n_samples=n, seed=seed
    )


def tabulate_cf(
    solid: SolidSpec,
    grid,
    n_per_point: int,
    seed: int,
    n_workers: int = 1,
) -> list[CurvePoint]:
    """Covariogram table on ``grid`` (sorted abscissae in [0, dmax]).

    Raw per-point estimates with stderr; no smoothing.  Each grid point
    gets its own spawned sub-seed, so the table is reproducible and
    independent of evaluation order.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) < 0):
        raise ValueError("grid must be a sorted 1-d array")
    if grid.size and (grid[0] < 0 or grid[-1] > solid.dmax * (1 + 1e-12)):
        raise ValueError("grid must lie within [0, dmax]")
    point_seeds = np.random.SeedSequence(seed).generate_state(grid.size)
    out = []
    for r, s in zip(grid, point_seeds):
        est = estimate_cf(solid, float(r), n_per_point, int(s), n_workers)
        out.append(CurvePoint(x=float(r), value=est.mean, stderr=est.stderr))
    return out
