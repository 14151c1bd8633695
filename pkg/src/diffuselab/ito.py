"""Discrete stochastic integrals and their statistical sanity checks.

All integrals use the left-endpoint convention: the integrand is frozen at
the start of each step, sum_i f(t_i) (W_{t_{i+1}} - W_{t_i}). The statistical
checks simulate per-path streams (path i uses stream_id = i) in blocks and
accumulate in ascending path order, so results are reproducible and do not
depend on block size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, InvalidParameterError
from .fieldexpr import FieldExpr
from .paths import Path
from .rng import RngStream

# Acceptance band for Monte Carlo checks, in units of the standard error.
CONFIDENCE_MULTIPLE = 4.0

DEFAULT_BLOCK_PATHS = 8192


@dataclass(frozen=True)
class SampledIntegrand:
    """Integrand values frozen at the left endpoint of each step.

    values has shape (n_steps,) for scalar integrands against a 1-D driver,
    or (n_steps, n, m) for matrix integrands against an m-dimensional driver
    (the integral is then the n-vector sum_i F_i dW_i).
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim not in (1, 3):
            raise DimensionError(f"values must have shape (n,) or (n, rows, cols), got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_steps(self) -> int:
        return self.values.shape[0]


def sample_time_function(f: Callable, path: Path) -> SampledIntegrand:
    """Sample a deterministic integrand f(t) at the path's left endpoints."""
    return SampledIntegrand(np.asarray(f(path.times[:-1]), dtype=np.float64))


def sample_state_function(f: Callable, path: Path) -> SampledIntegrand:
    """Sample f(X_t) at left endpoints of a 1-D path."""
    if path.dim != 1:
        raise DimensionError(f"state-function sampling expects a 1-D path, got d={path.dim}")
    return SampledIntegrand(np.asarray(f(path.states[:-1, 0]), dtype=np.float64))


def ito_integral(f: SampledIntegrand, w: Path):
    """Left-endpoint stochastic integral of f against the path w.

    Scalar integrands require a 1-D driver and return a float; matrix
    integrands of shape (n_steps, n, m) require an m-dimensional driver and
    return an n-vector.
    """
    if f.n_steps != w.n_steps:
        raise DimensionError(f"integrand has {f.n_steps} steps but the path has {w.n_steps}")
    dw = w.increments()
    if f.values.ndim == 1:
        if w.dim != 1:
            raise DimensionError(f"scalar integrand needs a 1-D driver, got d={w.dim}")
        return float(f.values @ dw[:, 0])
    if f.values.shape[2] != w.dim:
        raise DimensionError(
            f"matrix integrand has {f.values.shape[2]} columns but the driver has d={w.dim}"
        )
    return np.einsum("inm,im->n", f.values, dw)


def quadratic_covariation(x: Path, y: Path) -> float:
    """Discrete quadratic covariation sum_i dX_i dY_i of two scalar paths."""
    if x.dim != 1 or y.dim != 1:
        raise DimensionError(f"quadratic covariation expects scalar paths, got d={x.dim}, d={y.dim}")
    if not np.array_equal(x.times, y.times):
        raise DimensionError("paths must share the same time grid")
    return float(np.sum(x.increments()[:, 0] * y.increments()[:, 0]))


def _residual_scale(expected: float) -> float:
    # Relative tolerance for large values, absolute below magnitude one.
    return max(1.0, abs(expected))


def relative_residual(actual: float, expected: float) -> float:
    return abs(actual - expected) / _residual_scale(expected)


@dataclass(frozen=True)
class TestFunction:
    """A twice-differentiable test function with hand-coded derivatives.

    f, dx, dxx map floats/arrays to floats/arrays; dt is the explicit time
    derivative (None means time-independent).
    """

    name: str
    f: Callable
    dx: Callable
    dxx: Callable
    dt: Callable | None = None

    # keep pytest from collecting this as a test class
    __test__ = False


def ito_formula_residual(
    path: Path,
    drift: FieldExpr | Callable,
    diffusion: FieldExpr | Callable,
    fn: TestFunction,
    second_order: str = "dt",
) -> float:
    """Defect of the change-of-variables formula along one discrete path.

    residual = |f(T, X_T) - f(0, X_0)
                - sum_i [f_t + f_x b + 1/2 sigma^2 f_xx](t_i, X_i) dt
                - sum_i [f_x sigma](t_i, X_i) dX^mart_i|

    where the martingale increment is recovered as
    dX_i - b(t_i, X_i) dt (exact for paths produced by the Euler scheme).
    With second_order="qv" the 1/2 sigma^2 f_xx dt term is replaced by
    1/2 f_xx (sigma dW_i)^2, which makes polynomial cases like f(x) = x^2 on
    Brownian motion close exactly instead of up to O(sqrt(dt)).
    """
    if path.dim != 1:
        raise DimensionError(f"the change-of-variables check expects 1-D paths, got d={path.dim}")
    if second_order not in ("dt", "qv"):
        raise InvalidParameterError(f"second_order must be 'dt' or 'qv', got {second_order!r}")
    t = path.times[:-1]
    x = path.states[:-1, 0]
    dt = path.dt
    b = np.asarray(drift(x, 0.0, t) if isinstance(drift, FieldExpr) else drift(t, x), dtype=np.float64)
    s = np.asarray(diffusion(x, 0.0, t) if isinstance(diffusion, FieldExpr) else diffusion(t, x), dtype=np.float64)
    b = np.broadcast_to(b, x.shape)
    s = np.broadcast_to(s, x.shape)
    dx_total = path.increments()[:, 0]
    dw_scaled = dx_total - b * dt
    fx = np.broadcast_to(np.asarray(fn.dx(t, x), dtype=np.float64), x.shape)
    fxx = np.broadcast_to(np.asarray(fn.dxx(t, x), dtype=np.float64), x.shape)
    if second_order == "dt":
        second = 0.5 * fxx * s ** 2 * dt
    else:
        second = 0.5 * fxx * dw_scaled ** 2
    total = float(np.sum(fx * b * dt) + np.sum(second) + np.sum(fx * dw_scaled))
    if fn.dt is not None:
        ft = np.broadcast_to(np.asarray(fn.dt(t, x), dtype=np.float64), x.shape)
        total += float(np.sum(ft) * dt)
    lhs = fn.f(path.times[-1], path.states[-1, 0]) - fn.f(0.0, path.states[0, 0])
    return relative_residual(lhs, total)


def integration_by_parts_residual(x: Path, y: Path) -> float:
    """Defect of the discrete product rule
    X_T Y_T - X_0 Y_0 = sum X_i dY_i + sum Y_i dX_i + sum dX_i dY_i."""
    if x.dim != 1 or y.dim != 1:
        raise DimensionError("integration by parts expects scalar paths")
    if not np.array_equal(x.times, y.times):
        raise DimensionError("paths must share the same time grid")
    xv, yv = x.states[:, 0], y.states[:, 0]
    dx, dy = np.diff(xv), np.diff(yv)
    lhs = xv[-1] * yv[-1] - xv[0] * yv[0]
    rhs = float(xv[:-1] @ dy + yv[:-1] @ dx + dx @ dy)
    return relative_residual(lhs, rhs)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one Monte Carlo property check."""

    name: str
    mc_value: float
    expected: float
    stderr: float
    passed: bool
    details: dict = field(default_factory=dict)


def _block_ranges(n: int, block: int):
    for start in range(0, n, block):
        yield start, min(start + block, n)


def _normal_block(seed: int, start: int, stop: int, n: int) -> np.ndarray:
    """Rows of per-path unit normals for path ids [start, stop)."""
    out = np.empty((stop - start, n), dtype=np.float64)
    for i in range(start, stop):
        out[i - start] = RngStream(seed, i).normals(n)
    return out


def check_isometry(
    f: Callable,
    T: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    block_paths: int = DEFAULT_BLOCK_PATHS,
) -> CheckReport:
    """Compare E[(int f dW)^2] against the discrete sum of f^2 dt.

    f is a deterministic function of time, evaluated at left endpoints. The
    check passes when the Monte Carlo mean is within CONFIDENCE_MULTIPLE
    standard errors of the discrete second-moment identity.
    """
    _check_mc_sizes(T, n_steps, n_paths)
    times = np.linspace(0.0, T, n_steps + 1)[:-1]
    dt = T / n_steps
    fv = np.broadcast_to(np.asarray(f(times), dtype=np.float64), times.shape)
    expected = float(np.sum(fv ** 2) * dt)
    scale = fv * np.sqrt(dt)
    sum_sq = 0.0
    sum_quad = 0.0
    for start, stop in _block_ranges(n_paths, block_paths):
        z = _normal_block(seed, start, stop, n_steps)
        integrals = z @ scale
        sq = integrals ** 2
        sum_sq += float(np.sum(sq))
        sum_quad += float(np.sum(sq ** 2))
    mean = sum_sq / n_paths
    var = max(sum_quad / n_paths - mean ** 2, 0.0)
    stderr = float(np.sqrt(var / n_paths))
    passed = abs(mean - expected) <= CONFIDENCE_MULTIPLE * stderr
    return CheckReport(
        name="isometry",
        mc_value=mean,
        expected=expected,
        stderr=stderr,
        passed=passed,
        details={"n_paths": n_paths, "n_steps": n_steps, "T": T},
    )


def check_martingale_zero_mean(
    f: Callable,
    T: float,
    n_steps: int,
    n_paths: int,
    checkpoints: Sequence[float],
    seed: int,
    block_paths: int = DEFAULT_BLOCK_PATHS,
) -> CheckReport:
    """Zero-mean and uncorrelated-increment checks for M_t = int_0^t f dW.

    At each checkpoint the empirical mean of M must sit within
    CONFIDENCE_MULTIPLE standard errors of zero; for each consecutive pair of
    checkpoints the empirical correlation of M_s with M_t - M_s must sit
    within CONFIDENCE_MULTIPLE / sqrt(n_paths) of zero.
    """
    _check_mc_sizes(T, n_steps, n_paths)
    checkpoints = list(checkpoints)
    if not checkpoints:
        raise InvalidParameterError("at least one checkpoint is required")
    if any(not 0.0 < c <= T for c in checkpoints) or sorted(checkpoints) != checkpoints:
        raise InvalidParameterError(f"checkpoints must be increasing and in (0, T], got {checkpoints}")
    dt = T / n_steps
    idx = [int(round(c / dt)) for c in checkpoints]
    if any(i < 1 for i in idx) or len(set(idx)) != len(idx):
        raise InvalidParameterError("checkpoints collapse onto the grid; refine n_steps")
    times = np.linspace(0.0, T, n_steps + 1)[:-1]
    scale = np.broadcast_to(np.asarray(f(times), dtype=np.float64), times.shape) * np.sqrt(dt)
    values = np.empty((n_paths, len(idx)), dtype=np.float64)
    for start, stop in _block_ranges(n_paths, block_paths):
        z = _normal_block(seed, start, stop, n_steps)
        running = np.cumsum(z * scale, axis=1)
        values[start:stop] = running[:, [i - 1 for i in idx]]
    details: dict = {"checkpoints": checkpoints, "means": [], "stderrs": [], "increment_corrs": []}
    passed = True
    for k in range(len(idx)):
        mean = float(np.mean(values[:, k]))
        stderr = float(np.std(values[:, k], ddof=1) / np.sqrt(n_paths))
        details["means"].append(mean)
        details["stderrs"].append(stderr)
        if abs(mean) > CONFIDENCE_MULTIPLE * stderr:
            passed = False
    corr_bound = CONFIDENCE_MULTIPLE / np.sqrt(n_paths)
    for k in range(len(idx) - 1):
        inc = values[:, k + 1] - values[:, k]
        if np.std(inc) == 0.0 or np.std(values[:, k]) == 0.0:
            corr = 0.0
        else:
            corr = float(np.corrcoef(values[:, k], inc)[0, 1])
        details["increment_corrs"].append(corr)
        if abs(corr) > corr_bound:
            passed = False
    details["corr_bound"] = float(corr_bound)
    return CheckReport(
        name="martingale_zero_mean",
        mc_value=details["means"][-1],
        expected=0.0,
        stderr=details["stderrs"][-1],
        passed=passed,
        details=details,
    )


def check_quadratic_variation(
    f: Callable,
    T: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    block_paths: int = DEFAULT_BLOCK_PATHS,
) -> CheckReport:
    """Mean of sum f(t_i)^2 dW_i^2 against sum f(t_i)^2 dt."""
    _check_mc_sizes(T, n_steps, n_paths)
    times = np.linspace(0.0, T, n_steps + 1)[:-1]
    dt = T / n_steps
    fsq = np.broadcast_to(np.asarray(f(times), dtype=np.float64), times.shape) ** 2
    expected = float(np.sum(fsq) * dt)
    sum_qv = 0.0
    sum_qv_sq = 0.0
    for start, stop in _block_ranges(n_paths, block_paths):
        z = _normal_block(seed, start, stop, n_steps)
        qv = (z ** 2 * dt) @ fsq
        sum_qv += float(np.sum(qv))
        sum_qv_sq += float(np.sum(qv ** 2))
    mean = sum_qv / n_paths
    var = max(sum_qv_sq / n_paths - mean ** 2, 0.0)
    stderr = float(np.sqrt(var / n_paths))
    passed = abs(mean - expected) <= CONFIDENCE_MULTIPLE * stderr
    return CheckReport(
        name="quadratic_variation",
        mc_value=mean,
        expected=expected,
        stderr=stderr,
        passed=passed,
        details={"n_paths": n_paths, "n_steps": n_steps, "T": T},
    )


def _check_mc_sizes(T: float, n_steps: int, n_paths: int) -> None:
    if not (np.isfinite(T) and T > 0):
        raise InvalidParameterError(f"T must be positive, got {T}")
    if n_steps < 1 or n_paths < 2:
        raise InvalidParameterError(f"need n_steps >= 1 and n_paths >= 2, got {n_steps}, {n_paths}")
