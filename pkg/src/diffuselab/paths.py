"""Discrete sample paths on uniform time grids."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidParameterError
from .rng import RngStream


@dataclass(frozen=True)
class Path:
    """A sampled trajectory: times (n_steps + 1,) and states (n_steps + 1, d).

    The grid must start at 0 and be uniformly spaced; both arrays are made
    read-only so a Path can be shared freely after construction.
    """

    times: np.ndarray
    states: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        states = np.ascontiguousarray(self.states, dtype=np.float64)
        if states.ndim == 1:
            states = states[:, None]
        if times.ndim != 1 or times.size < 2:
            raise DimensionError(f"times must be 1-D with at least 2 nodes, got shape {self.times.shape}")
        if states.ndim != 2 or states.shape[0] != times.size:
            raise DimensionError(
                f"states must have shape (len(times), d), got {states.shape} for {times.size} nodes"
            )
        dim = states.shape[1]
        if self.dim not in (0, dim):
            raise DimensionError(f"declared dim {self.dim} does not match states with d={dim}")
        if times[0] != 0.0:
            raise InvalidParameterError(f"times must start at 0, got {times[0]}")
        diffs = np.diff(times)
        dt = times[-1] / (times.size - 1)
        if dt <= 0 or not np.all(np.abs(diffs - dt) <= 8.0 * np.spacing(times[-1])):
            raise InvalidParameterError("times must be strictly increasing and uniformly spaced")
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "dim", dim)

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    @property
    def dt(self) -> float:
        return float(self.times[-1] / self.n_steps)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def increments(self) -> np.ndarray:
        """State increments, shape (n_steps, d)."""
        return np.diff(self.states, axis=0)

    def component(self, j: int) -> np.ndarray:
        return self.states[:, j]


def brownian_path(stream: RngStream, x0, T: float, n_steps: int, d: int | None = None) -> Path:
    """Sample a standard Brownian path started at x0 on a uniform grid.

    Increments are N(0, dt I_d) built from the stream's normal sequence in
    step-major order (all coordinates of step 0, then step 1, ...). The
    scaling by sqrt(dt) is applied after the cumulative sum, so paths driven
    by the same stream at horizons T and 4T satisfy the exact self-similarity
    states_4T - x0 = 2 (states_T - x0).
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    if x0.ndim != 1:
        raise DimensionError(f"x0 must be a scalar or 1-D array, got shape {x0.shape}")
    if d is None:
        d = x0.size
    if x0.size == 1 and d > 1:
        x0 = np.full(d, x0[0])
    if d != x0.size:
        raise DimensionError(f"x0 has {x0.size} components but d={d} was requested")
    if not np.all(np.isfinite(x0)):
        raise InvalidParameterError("x0 must be finite")
    if not (np.isfinite(T) and T > 0):
        raise InvalidParameterError(f"T must be positive, got {T}")
    if not isinstance(n_steps, (int, np.integer)) or n_steps < 1:
        raise InvalidParameterError(f"n_steps must be a positive integer, got {n_steps!r}")
    n_steps = int(n_steps)
    dt = T / n_steps
    z = stream.normals(n_steps * d).reshape(n_steps, d)
    states = np.empty((n_steps + 1, d), dtype=np.float64)
    states[0] = x0
    states[1:] = x0 + np.cumsum(z, axis=0) * np.sqrt(dt)
    times = np.linspace(0.0, T, n_steps + 1)
    return Path(times=times, states=states)
