"""Histogram density estimates on box grids, plus distances between grids.

Binning matches numpy.histogramdd: bins are half-open [edge_i, edge_i+1)
except the last, which is closed so samples landing exactly on the upper
boundary are kept. Samples outside the box are dropped and counted; the
estimated density then integrates to 1 - dropped_fraction on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError, InvalidParameterError
from .pde import ScalarGrid


@dataclass(frozen=True)
class HistogramSpec:
    """Geometry of a histogram: box corners and bin counts per axis."""

    lo: np.ndarray
    hi: np.ndarray
    bins: tuple

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=np.float64))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=np.float64))
        bins = tuple(int(b) for b in np.atleast_1d(self.bins))
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size not in (1, 2):
            raise DimensionError(f"lo and hi must be vectors of length 1 or 2, got {lo.shape}, {hi.shape}")
        if len(bins) != lo.size:
            raise DimensionError(f"bins must have one entry per axis, got {bins}")
        if any(b < 2 for b in bins):
            # grids require at least 2 cells per axis
            raise InvalidParameterError(f"need at least 2 bins per axis, got {bins}")
        if np.any(lo >= hi) or not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidParameterError(f"box must be finite with lo < hi, got {lo}, {hi}")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "bins", bins)

    @property
    def d(self) -> int:
        return self.lo.size

    def edges(self) -> list:
        return [np.linspace(self.lo[i], self.hi[i], self.bins[i] + 1) for i in range(self.d)]


def histogram_density(samples: np.ndarray, spec: HistogramSpec):
    """Estimate a density from samples.

    Returns (grid, dropped_fraction). Counts are divided by
    n_total * cell_volume, so the grid integrates to the kept fraction of
    samples; with nothing dropped the mass is 1 up to rounding.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.ndim != 2 or samples.shape[1] != spec.d:
        raise DimensionError(f"samples must have shape (n, {spec.d}), got {samples.shape}")
    n_total = samples.shape[0]
    if n_total < 1:
        raise InvalidParameterError("need at least one sample")
    counts, _ = np.histogramdd(samples, bins=spec.edges())
    kept = float(counts.sum())
    dropped_fraction = (n_total - kept) / n_total
    volume = float(np.prod((spec.hi - spec.lo) / np.asarray(spec.bins, dtype=np.float64)))
    values = counts / (n_total * volume)
    grid = ScalarGrid(spec.lo, spec.hi, values if spec.d == 2 else values.reshape(spec.bins[0]))
    return grid, float(dropped_fraction)


def _check_compatible(p: ScalarGrid, q: ScalarGrid) -> None:
    if not p.same_geometry(q):
        raise DimensionError(
            f"grids are not comparable: shapes {p.values.shape} vs {q.values.shape}, "
            f"boxes [{p.lo}, {p.hi}] vs [{q.lo}, {q.hi}]"
        )


def l1_distance(p: ScalarGrid, q: ScalarGrid) -> float:
    """Integral of |p - q| over the box (cell sums times cell volume)."""
    _check_compatible(p, q)
    return float(np.sum(np.abs(p.values - q.values)) * p.cell_volume)


def l2_distance(p: ScalarGrid, q: ScalarGrid) -> float:
    """Square root of the integral of (p - q)^2."""
    _check_compatible(p, q)
    return float(np.sqrt(np.sum((p.values - q.values) ** 2) * p.cell_volume))


def sup_distance(p: ScalarGrid, q: ScalarGrid) -> float:
    """Largest cellwise difference."""
    _check_compatible(p, q)
    return float(np.max(np.abs(p.values - q.values)))


def noise_floor(
    sampler: Callable[[int, int], np.ndarray],
    n_samples: int,
    spec: HistogramSpec,
    seeds: tuple,
) -> float:
    """L1 distance between histograms of two same-law sample sets.

    sampler(seed, n) must return (n, d) samples. The two seeds should be
    independent of each other and of the run being calibrated; identical
    seeds give a floor of exactly zero. The returned value estimates the
    statistical wiggle two ideal runs show at this sample count, the scale
    against which an empirical-vs-analytic distance should be judged.
    """
    if len(seeds) != 2:
        raise InvalidParameterError(f"need exactly two seeds, got {len(seeds)}")
    a, _ = histogram_density(sampler(int(seeds[0]), n_samples), spec)
    b, _ = histogram_density(sampler(int(seeds[1]), n_samples), spec)
    return l1_distance(a, b)
