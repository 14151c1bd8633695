"""Euler scheme for Ito diffusions, single paths and ensembles.

Ensembles draw path i from stream_id = i of the run's seed, so any path can
be re-simulated in isolation and results do not depend on how paths are
grouped into blocks or distributed over worker threads. Blocks are simulated
with vectorized coefficient evaluation; workers only change scheduling, the
per-block arithmetic and the assembly order are fixed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DimensionError,
    FieldEvalError,
    InvalidParameterError,
    SimulationError,
    StateOverflowError,
)
from .fieldexpr import FieldExpr, FieldSpec
from .paths import Path
from .rng import RngStream

# States beyond this magnitude abort the simulation before they turn into
# overflows deeper in the arithmetic.
STATE_BOUND = 1.0e12

DEFAULT_BLOCK_PATHS = 8192


@dataclass(frozen=True)
class SdeProblem:
    """A diffusion dX = b dt + sigma dW on [t0, t0 + T] from a fixed start."""

    fields: FieldSpec
    x0: np.ndarray
    T: float
    n_steps: int
    t0: float = 0.0

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=np.float64))
        if x0.ndim != 1 or x0.size != self.fields.d:
            raise DimensionError(f"x0 must have {self.fields.d} components, got shape {x0.shape}")
        if not np.all(np.isfinite(x0)):
            raise InvalidParameterError("x0 must be finite")
        if not (np.isfinite(self.T) and self.T > 0):
            raise InvalidParameterError(f"T must be positive, got {self.T}")
        if not isinstance(self.n_steps, (int, np.integer)) or self.n_steps < 1:
            raise InvalidParameterError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        if not np.isfinite(self.t0):
            raise InvalidParameterError(f"t0 must be finite, got {self.t0}")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def d(self) -> int:
        return self.fields.d

    @property
    def m(self) -> int:
        return self.fields.m

    @property
    def dt(self) -> float:
        return self.T / self.n_steps


def _eval_fields_block(fields: FieldSpec, x: np.ndarray, t: float, step: int, path_offset: int):
    """Evaluate drift (B, d) and diffusion (B, d) diagonal or (B, d, m) dense."""
    d, m = fields.d, fields.m
    xs = x[:, 0]
    ys = x[:, 1] if d > 1 else 0.0
    try:
        drift = np.empty_like(x)
        for i in range(d):
            drift[:, i] = fields.drift[i](xs, ys, t)
        if fields.is_diagonal:
            diff = np.empty_like(x)
            for i in range(d):
                diff[:, i] = fields.diffusion[i][i](xs, ys, t)
            return drift, diff, True
        diff = np.empty((x.shape[0], d, m), dtype=np.float64)
        for i in range(d):
            for j in range(m):
                diff[:, i, j] = fields.diffusion[i][j](xs, ys, t)
        return drift, diff, False
    except FieldEvalError as exc:
        path_id = None if exc.index is None else path_offset + exc.index
        raise SimulationError(f"coefficient evaluation failed: {exc}", step=step, path_id=path_id) from exc


def _check_states(x: np.ndarray, step: int, path_offset: int) -> None:
    bad = ~np.isfinite(x).all(axis=1) | (np.max(np.abs(x), axis=1) > STATE_BOUND)
    if np.any(bad):
        path_id = path_offset + int(np.argmax(bad))
        raise StateOverflowError(
            f"state left the trusted range (|X| <= {STATE_BOUND:g})", step=step, path_id=path_id
        )


def _euler_block(problem: SdeProblem, increments: np.ndarray, path_offset: int, record: bool):
    """Advance a block of paths; increments has shape (B, n_steps, m).

    Returns (terminal (B, d), trajectory (B, n_steps + 1, d) or None).
    """
    n, dt = problem.n_steps, problem.dt
    B = increments.shape[0]
    x = np.tile(problem.x0, (B, 1))
    traj = None
    if record:
        traj = np.empty((B, n + 1, problem.d), dtype=np.float64)
        traj[:, 0] = x
    for i in range(n):
        t_i = problem.t0 + i * dt
        drift, diff, diagonal = _eval_fields_block(problem.fields, x, t_i, i, path_offset)
        dw = increments[:, i, :]
        if diagonal:
            x = x + drift * dt + diff * dw
        else:
            x = x + drift * dt + np.einsum("bdm,bm->bd", diff, dw)
        _check_states(x, step=i, path_offset=path_offset)
        if record:
            traj[:, i + 1] = x
    return x, traj


def euler_maruyama(problem: SdeProblem, stream: RngStream, return_increments: bool = False):
    """Simulate one path with the Euler scheme driven by the given stream.

    Consumes n_steps * m normals in step-major order. Returns the Path, or
    (Path, dW) with the Brownian increments when return_increments is set.
    """
    n, m = problem.n_steps, problem.m
    z = stream.normals(n * m).reshape(1, n, m)
    dw = z * np.sqrt(problem.dt)
    _, traj = _euler_block(problem, dw, path_offset=0, record=True)
    times = np.linspace(0.0, problem.T, n + 1)
    path = Path(times=times, states=traj[0])
    if return_increments:
        return path, dw[0]
    return path


@dataclass(frozen=True)
class Ensemble:
    """A family of independent paths of one problem.

    storage controls what simulate_ensemble keeps: "terminal" keeps only the
    final states, "full" keeps every path, "thinned" keeps every thin_every-th
    time node (thin_every must divide n_steps).
    """

    problem: SdeProblem
    n_paths: int
    seed: int
    storage: str = "terminal"
    thin_every: int = 1

    def __post_init__(self):
        if self.n_paths < 1:
            raise InvalidParameterError(f"n_paths must be positive, got {self.n_paths}")
        if self.storage not in ("terminal", "full", "thinned"):
            raise InvalidParameterError(f"storage must be terminal, full, or thinned, got {self.storage!r}")
        if self.storage == "thinned":
            if self.thin_every < 1 or self.problem.n_steps % self.thin_every != 0:
                raise InvalidParameterError(
                    f"thin_every must divide n_steps={self.problem.n_steps}, got {self.thin_every}"
                )


@dataclass(frozen=True)
class EnsembleResult:
    terminal: np.ndarray
    paths: list | None
    seed: int
    n_paths: int


def _simulate_block(ens: Ensemble, start: int, stop: int):
    problem = ens.problem
    n, m = problem.n_steps, problem.m
    sqdt = np.sqrt(problem.dt)
    z = np.empty((stop - start, n * m), dtype=np.float64)
    for i in range(start, stop):
        z[i - start] = RngStream(ens.seed, i).normals(n * m)
    dw = z.reshape(stop - start, n, m) * sqdt
    record = ens.storage != "terminal"
    terminal, traj = _euler_block(problem, dw, path_offset=start, record=record)
    paths = None
    if record:
        step = ens.thin_every if ens.storage == "thinned" else 1
        times = np.linspace(0.0, problem.T, n + 1)[::step]
        paths = [Path(times=times, states=traj[k, ::step]) for k in range(stop - start)]
    return terminal, paths


def simulate_ensemble(ens: Ensemble, n_workers: int = 1, block_paths: int = DEFAULT_BLOCK_PATHS) -> EnsembleResult:
    """Simulate all paths of an ensemble.

    Fail-fast: the first path whose coefficients error or whose state leaves
    the trusted range aborts the run with that path id and step. Results are
    byte-identical for any n_workers and block_paths.
    """
    if n_workers < 1:
        raise InvalidParameterError(f"n_workers must be positive, got {n_workers}")
    ranges = [(s, min(s + block_paths, ens.n_paths)) for s in range(0, ens.n_paths, block_paths)]
    results: list = [None] * len(ranges)
    if n_workers == 1 or len(ranges) == 1:
        for k, (start, stop) in enumerate(ranges):
            results[k] = _simulate_block(ens, start, stop)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(_simulate_block, ens, start, stop) for start, stop in ranges]
            for k, fut in enumerate(futures):
                results[k] = fut.result()
    terminal = np.concatenate([r[0] for r in results], axis=0)
    paths = None
    if ens.storage != "terminal":
        paths = [p for r in results for p in r[1]]
    return EnsembleResult(terminal=terminal, paths=paths, seed=ens.seed, n_paths=ens.n_paths)


def gbm_exact(s0: float, mu: float, sigma: float, t, w_t):
    """Closed-form geometric Brownian motion S_t driven by W_t."""
    if s0 <= 0:
        raise InvalidParameterError(f"s0 must be positive, got {s0}")
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise InvalidParameterError("t must be non-negative")
    out = s0 * np.exp((mu - 0.5 * sigma ** 2) * t + sigma * np.asarray(w_t, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


def gbm_strong_convergence(
    mu: float,
    sigma: float,
    s0: float,
    T: float,
    dt_exponents,
    n_paths: int,
    seed: int,
) -> dict:
    """Strong error of the Euler scheme for GBM over dyadic step sizes.

    All levels reuse the same Brownian paths: level k uses dt = 2**-k and its
    increments are pairwise sums of the finest level's. Returns the mean
    absolute terminal error per level and the log-log slope.
    """
    exps = sorted(int(k) for k in dt_exponents)
    if len(exps) < 2:
        raise InvalidParameterError("need at least two step sizes for a slope")
    k_max = exps[-1]
    n_fine = 2 ** k_max
    if T <= 0 or n_paths < 1:
        raise InvalidParameterError("T must be positive and n_paths >= 1")
    dt_fine = T / n_fine
    z = np.empty((n_paths, n_fine), dtype=np.float64)
    for i in range(n_paths):
        z[i] = RngStream(seed, i).normals(n_fine)
    dw_fine = z * np.sqrt(dt_fine)
    w_T = dw_fine.sum(axis=1)
    exact = gbm_exact(s0, mu, sigma, T, w_T)
    errors = []
    for k in exps:
        group = 2 ** (k_max - k)
        dw = dw_fine.reshape(n_paths, 2 ** k, group).sum(axis=2)
        dt = T / 2 ** k
        x = np.full(n_paths, float(s0))
        for i in range(2 ** k):
            x = x + mu * x * dt + sigma * x * dw[:, i]
        errors.append(float(np.mean(np.abs(x - exact))))
    dts = [T / 2 ** k for k in exps]
    slope, intercept = np.polyfit(np.log(dts), np.log(errors), 1)
    return {
        "dt": dts,
        "mean_abs_error": errors,
        "slope": float(slope),
        "intercept": float(intercept),
    }


@dataclass(frozen=True)
class CoefficientReport:
    """Empirical regularity probes of drift and diffusion on a box."""

    lipschitz_drift: float
    lipschitz_diffusion: float
    growth_drift: float
    growth_diffusion: float
    warnings: tuple

    @property
    def ok(self) -> bool:
        return not self.warnings


def validate_coefficients(
    fields: FieldSpec,
    lo,
    hi,
    n_probes: int = 10_000,
    cap: float = 100.0,
    seed: int = 0,
) -> CoefficientReport:
    """Probe Lipschitz and linear-growth ratios of the coefficients.

    Draws n_probes point pairs uniformly from the box and estimates
    sup |f(u) - f(v)| / |u - v| and sup |f(u)| / (1 + |u|) over all
    coefficient entries. Ratios above cap, or evaluation errors, become
    warnings; the report is advisory and never raises for rough fields.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
    d = fields.d
    if lo.size != d or hi.size != d:
        raise DimensionError(f"box must have {d} components per corner, got {lo.size}, {hi.size}")
    if np.any(lo >= hi):
        raise InvalidParameterError("box must have lo < hi componentwise")
    if n_probes < 2:
        raise InvalidParameterError(f"n_probes must be >= 2, got {n_probes}")
    stream = RngStream(seed, 0)
    u = stream.uniforms(2 * n_probes * d).reshape(2, n_probes, d)
    pts = lo + u * (hi - lo)
    p, q = pts[0], pts[1]
    gap = np.sqrt(np.sum((p - q) ** 2, axis=1))
    keep = gap > 1e-12
    warnings: list[str] = []
    exprs = list(fields.drift) + [fields.diffusion[i][j] for i in range(d) for j in range(fields.m)]
    names = [f"drift[{i}]" for i in range(d)] + [
        f"diffusion[{i}][{j}]" for i in range(d) for j in range(fields.m)
    ]
    n_drift = d

    def eval_at(e: FieldExpr, pts2: np.ndarray) -> np.ndarray:
        xs = pts2[:, 0]
        ys = pts2[:, 1] if d > 1 else 0.0
        return np.asarray(e(xs, ys, 0.0), dtype=np.float64)

    lip = np.zeros(len(exprs))
    growth = np.zeros(len(exprs))
    norm_p = np.sqrt(np.sum(p ** 2, axis=1))
    for k, e in enumerate(exprs):
        try:
            fp = eval_at(e, p)
            fq = eval_at(e, q)
        except FieldEvalError as exc:
            warnings.append(f"{names[k]}: {exc}")
            lip[k] = np.nan
            growth[k] = np.nan
            continue
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fq))):
            warnings.append(f"{names[k]}: non-finite value inside the box")
            lip[k] = np.nan
            growth[k] = np.nan
            continue
        lip[k] = float(np.max(np.abs(fp - fq)[keep] / gap[keep])) if np.any(keep) else 0.0
        growth[k] = float(np.max(np.abs(fp) / (1.0 + norm_p)))
        if lip[k] > cap:
            warnings.append(f"{names[k]}: Lipschitz ratio {lip[k]:.3g} exceeds cap {cap:g}")
        if growth[k] > cap:
            warnings.append(f"{names[k]}: growth ratio {growth[k]:.3g} exceeds cap {cap:g}")

    def agg(vals: np.ndarray) -> float:
        finite = vals[np.isfinite(vals)]
        return float(np.max(finite)) if finite.size else float("nan")

    return CoefficientReport(
        lipschitz_drift=agg(lip[:n_drift]),
        lipschitz_diffusion=agg(lip[n_drift:]),
        growth_drift=agg(growth[:n_drift]),
        growth_diffusion=agg(growth[n_drift:]),
        warnings=tuple(warnings),
    )
