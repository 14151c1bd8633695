"""Explicit finite-difference solvers on cell-centered grids.

All solvers share the same conventions: the box [lo, hi] is split into
n_cells equal cells per axis, unknowns live at cell centers, and boundaries
are closed (zero flux for the density solvers, reflected ghost cells for the
others). Time stepping is forward Euler; when the requested step violates
the stability bound it is divided by 2^k, and the factor is reported on the
result.

The density solver advances the divergence form

    p_t = -sum_i d_i(b_i p) + 1/2 sum_ij d_i d_j(a_ij p),    a = sigma sigma^T

through face fluxes, so interior updates telescope and total mass is
conserved to rounding. Negative values produced by the explicit stencil are
clipped once at the end of the run; the clipped mass is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InstabilityError, InvalidParameterError
from .fieldexpr import FieldExpr, FieldSpec

MAX_SUBSTEP_DOUBLINGS = 40


@dataclass(frozen=True)
class ScalarGrid:
    """A scalar field sampled at the cell centers of a uniform box grid.

    values has shape (nx,) in 1-D or (nx, ny) in 2-D. lo and hi are the box
    corners; cell i along axis a is centered at lo[a] + (i + 1/2) dx[a].
    """

    lo: np.ndarray
    hi: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=np.float64))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=np.float64))
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size not in (1, 2):
            raise DimensionError(f"lo and hi must be vectors of length 1 or 2, got {lo.shape}, {hi.shape}")
        if np.any(lo >= hi) or not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidParameterError(f"box must be finite with lo < hi, got {lo}, {hi}")
        if values.ndim != lo.size:
            raise DimensionError(f"values must be {lo.size}-D to match the box, got shape {values.shape}")
        if any(n < 2 for n in values.shape):
            raise InvalidParameterError(f"need at least 2 cells per axis, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("grid values must be finite")
        lo.setflags(write=False)
        hi.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return self.lo.size

    @property
    def n_cells(self) -> tuple:
        return self.values.shape

    @property
    def cell_sizes(self) -> np.ndarray:
        return (self.hi - self.lo) / np.asarray(self.values.shape, dtype=np.float64)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_sizes))

    def centers(self, axis: int = 0) -> np.ndarray:
        n = self.values.shape[axis]
        dx = self.cell_sizes[axis]
        return self.lo[axis] + (np.arange(n) + 0.5) * dx

    def meshgrid(self):
        if self.d == 1:
            return (self.centers(0),)
        return np.meshgrid(self.centers(0), self.centers(1), indexing="ij")

    def total_mass(self) -> float:
        return float(np.sum(self.values) * self.cell_volume)

    def normalized(self) -> "ScalarGrid":
        mass = self.total_mass()
        if not mass > 0:
            raise InvalidParameterError(f"cannot normalize a grid with mass {mass}")
        return ScalarGrid(self.lo, self.hi, self.values / mass)

    def same_geometry(self, other: "ScalarGrid", tol: float = 1e-12) -> bool:
        return (
            self.values.shape == other.values.shape
            and bool(np.all(np.abs(self.lo - other.lo) <= tol))
            and bool(np.all(np.abs(self.hi - other.hi) <= tol))
        )


def grid_from_expr(e: FieldExpr, lo, hi, n_cells, t: float = 0.0) -> ScalarGrid:
    """Sample an expression at cell centers."""
    lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
    shape = tuple(int(n) for n in np.atleast_1d(n_cells))
    if len(shape) != lo.size:
        raise DimensionError(f"n_cells must have one entry per axis, got {shape} for a {lo.size}-D box")
    probe = ScalarGrid(lo, hi, np.zeros(shape))
    if lo.size == 1:
        vals = e(probe.centers(0), 0.0, t)
    else:
        gx, gy = probe.meshgrid()
        vals = e(gx, gy, t)
    vals = np.broadcast_to(np.asarray(vals, dtype=np.float64), shape)
    return ScalarGrid(lo, hi, vals.copy())


def gaussian_grid(lo, hi, n_cells, center, sigma: float) -> ScalarGrid:
    """An isotropic Gaussian bump sampled at cell centers and normalized to
    unit mass on the grid. Used as a concentrated initial density."""
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
    center = np.atleast_1d(np.asarray(center, dtype=np.float64))
    shape = tuple(int(n) for n in np.atleast_1d(n_cells))
    probe = ScalarGrid(lo, hi, np.zeros(shape))
    if lo.size == 1:
        sq = (probe.centers(0) - center[0]) ** 2
    else:
        gx, gy = probe.meshgrid()
        sq = (gx - center[0]) ** 2 + (gy - center[1]) ** 2
    vals = np.exp(-sq / (2.0 * sigma ** 2))
    return ScalarGrid(lo, hi, vals).normalized()


def _substep_factor(dt: float, dt_max: float) -> int:
    if dt <= dt_max:
        return 1
    k = int(np.ceil(np.log2(dt / dt_max)))
    if k > MAX_SUBSTEP_DOUBLINGS:
        raise InvalidParameterError(
            f"stability requires dt <= {dt_max:g}; refusing to substep {dt:g} by 2**{k}"
        )
    return 2 ** k


# Magnitudes beyond this are runaway oscillations even when still finite.
SOLUTION_BOUND = 1.0e100


def _check_finite(u: np.ndarray, step: int) -> None:
    if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > SOLUTION_BOUND:
        raise InstabilityError("solution left the trusted range; the march is unstable", step=step)


def _lap_axis(u: np.ndarray, axis: int, inv_dx2: float) -> np.ndarray:
    # Reflected ghost cells: closed (no-flux) boundaries.
    g = np.pad(u, [(1, 1) if a == axis else (0, 0) for a in range(u.ndim)], mode="edge")
    sl_hi = [slice(2, None) if a == axis else slice(None) for a in range(u.ndim)]
    sl_lo = [slice(0, -2) if a == axis else slice(None) for a in range(u.ndim)]
    return (g[tuple(sl_hi)] - 2.0 * u + g[tuple(sl_lo)]) * inv_dx2


@dataclass(frozen=True)
class HeatSolution:
    grid: ScalarGrid
    substep_factor: int
    steps_taken: int


def solve_heat(
    f0,
    kappa: float,
    T: float,
    n_t: int,
    lo=None,
    hi=None,
    n_cells=None,
) -> HeatSolution:
    """March u_t = kappa lap(u) with the explicit scheme and closed
    boundaries. f0 is a ScalarGrid, or a FieldExpr sampled on (lo, hi,
    n_cells). The step T/n_t is refined by 2^k to satisfy
    kappa dt sum_i(1/dx_i^2) <= 1/2.
    """
    if not (np.isfinite(kappa) and kappa > 0):
        raise InvalidParameterError(f"kappa must be positive, got {kappa}")
    if not (np.isfinite(T) and T > 0) or n_t < 1:
        raise InvalidParameterError(f"T must be positive and n_t >= 1, got {T}, {n_t}")
    grid0 = f0 if isinstance(f0, ScalarGrid) else grid_from_expr(f0, lo, hi, n_cells)
    dx = grid0.cell_sizes
    dt_max = 0.5 / (kappa * float(np.sum(1.0 / dx ** 2)))
    factor = _substep_factor(T / n_t, dt_max)
    steps = n_t * factor
    dt = T / steps
    u = grid0.values.copy()
    coefs = [kappa * dt / dx[a] ** 2 for a in range(grid0.d)]
    for step in range(steps):
        acc = _lap_axis(u, 0, coefs[0])
        if grid0.d == 2:
            acc = acc + _lap_axis(u, 1, coefs[1])
        u = u + acc
        _check_finite(u, step)
    return HeatSolution(grid=ScalarGrid(grid0.lo, grid0.hi, u), substep_factor=factor, steps_taken=steps)


@dataclass(frozen=True)
class FpSolution:
    grid: ScalarGrid
    substep_factor: int
    steps_taken: int
    mass_drift: float
    clipped_mass: float


def _face_flux_1d(p: np.ndarray, b: np.ndarray, ap: np.ndarray, dx: float) -> np.ndarray:
    """Fluxes at the n+1 faces along a 1-D axis; boundary faces are zero."""
    flux = np.zeros(p.size + 1, dtype=np.float64)
    adv = 0.5 * (b[:-1] * p[:-1] + b[1:] * p[1:])
    diffusive = (ap[1:] - ap[:-1]) / dx
    flux[1:-1] = adv - 0.5 * diffusive
    return flux


def solve_fokker_planck(
    fields: FieldSpec,
    p0,
    T: float,
    n_t: int,
    lo=None,
    hi=None,
    n_cells=None,
) -> FpSolution:
    """March the density equation of the diffusion given by fields.

    p0 is a ScalarGrid or FieldExpr; the initial data is normalized to unit
    mass on the grid. Coefficients are sampled at cell centers (per time
    level when they depend on t). a = sigma sigma^T must be positive
    semidefinite at every center. Boundary faces carry zero flux, so mass is
    conserved up to rounding; the drift |mass_end - mass_start| is reported,
    as is any negative mass clipped after the final step.
    """
    if not (np.isfinite(T) and T > 0) or n_t < 1:
        raise InvalidParameterError(f"T must be positive and n_t >= 1, got {T}, {n_t}")
    if fields.d not in (1, 2) or fields.d != fields.m:
        raise DimensionError(f"the density solver supports square 1-D or 2-D systems, got d={fields.d}, m={fields.m}")
    grid0 = (p0 if isinstance(p0, ScalarGrid) else grid_from_expr(p0, lo, hi, n_cells)).normalized()
    if np.any(grid0.values < 0):
        raise InvalidParameterError("initial density must be non-negative")
    d = grid0.d
    dx = grid0.cell_sizes

    def coeffs_at(t: float):
        if d == 1:
            xs = grid0.centers(0)
            env = (xs, 0.0)
        else:
            gx, gy = grid0.meshgrid()
            env = (gx, gy)
        shape = grid0.values.shape
        b = [np.broadcast_to(np.asarray(fields.drift[i](env[0], env[1], t), dtype=np.float64), shape)
             for i in range(d)]
        sig = [
            [np.broadcast_to(np.asarray(fields.diffusion[i][j](env[0], env[1], t), dtype=np.float64), shape)
             for j in range(d)]
            for i in range(d)
        ]
        a = [[sum(sig[i][k] * sig[j][k] for k in range(d)) for j in range(d)] for i in range(d)]
        for i in range(d):
            if not (np.all(np.isfinite(b[i])) and all(np.all(np.isfinite(sig[i][j])) for j in range(d))):
                raise InvalidParameterError(f"coefficients are not finite on the grid at t={t}")
            if np.any(a[i][i] < 0):
                raise InvalidParameterError("diffusion matrix has a negative diagonal entry on the grid")
        if d == 2:
            det = a[0][0] * a[1][1] - a[0][1] ** 2
            if np.any(det < -1e-12):
                raise InvalidParameterError("diffusion matrix is not positive semidefinite on the grid")
        return b, a

    b0, a0 = coeffs_at(0.0)
    max_a = [float(np.max(a0[i][i])) for i in range(d)]
    max_b = [float(np.max(np.abs(b0[i]))) for i in range(d)]
    dt_max = np.inf
    for i in range(d):
        if max_a[i] > 0:
            dt_max = min(dt_max, 0.25 * dx[i] ** 2 / max_a[i])
        if max_b[i] > 0:
            dt_max = min(dt_max, 0.5 * dx[i] / max_b[i])
    if not np.isfinite(dt_max):
        dt_max = T / n_t
    factor = _substep_factor(T / n_t, dt_max)
    steps = n_t * factor
    dt = T / steps
    time_dependent = fields.uses_t
    p = grid0.values.copy()
    mass0 = float(np.sum(p)) * grid0.cell_volume
    b, a = b0, a0
    has_cross = d == 2 and (np.any(a0[0][1] != 0.0))
    for step in range(steps):
        if time_dependent and step > 0:
            b, a = coeffs_at(step * dt)
        if d == 1:
            flux = _face_flux_1d(p, b[0], a[0][0] * p, dx[0])
            p = p - dt / dx[0] * (flux[1:] - flux[:-1])
        else:
            qx = a[0][0] * p
            qy = a[1][1] * p
            fx = np.zeros((p.shape[0] + 1, p.shape[1]))
            adv = 0.5 * (b[0][:-1, :] * p[:-1, :] + b[0][1:, :] * p[1:, :])
            fx[1:-1, :] = adv - 0.5 * (qx[1:, :] - qx[:-1, :]) / dx[0]
            fy = np.zeros((p.shape[0], p.shape[1] + 1))
            adv = 0.5 * (b[1][:, :-1] * p[:, :-1] + b[1][:, 1:] * p[:, 1:])
            fy[:, 1:-1] = adv - 0.5 * (qy[:, 1:] - qy[:, :-1]) / dx[1]
            if has_cross:
                # Each flux carries half of the mixed derivative; the pair
                # sums to the full d_x d_y (a_xy p) term.
                qc = a[0][1] * p
                gc = np.pad(qc, ((0, 0), (1, 1)), mode="edge")
                dqc_dy = (gc[:, 2:] - gc[:, :-2]) / (2.0 * dx[1])
                fx[1:-1, :] -= 0.25 * (dqc_dy[:-1, :] + dqc_dy[1:, :])
                gc = np.pad(qc, ((1, 1), (0, 0)), mode="edge")
                dqc_dx = (gc[2:, :] - gc[:-2, :]) / (2.0 * dx[0])
                fy[:, 1:-1] -= 0.25 * (dqc_dx[:, :-1] + dqc_dx[:, 1:])
            p = p - dt / dx[0] * (fx[1:, :] - fx[:-1, :]) - dt / dx[1] * (fy[:, 1:] - fy[:, :-1])
        _check_finite(p, step)
    mass1 = float(np.sum(p)) * grid0.cell_volume
    if not (np.isfinite(mass1) and mass1 > 0):
        raise InstabilityError(
            f"final mass {mass1:g} is not positive; the march is unstable", step=steps - 1
        )
    clipped = float(-np.sum(p[p < 0])) * grid0.cell_volume
    if clipped > 0:
        p = np.clip(p, 0.0, None)
        current = float(np.sum(p)) * grid0.cell_volume
        p = p * (mass1 / current)
    return FpSolution(
        grid=ScalarGrid(grid0.lo, grid0.hi, p),
        substep_factor=factor,
        steps_taken=steps,
        mass_drift=abs(mass1 - mass0) / abs(mass0),
        clipped_mass=clipped,
    )


@dataclass(frozen=True)
class BackwardSolution:
    grid: ScalarGrid
    substep_factor: int
    steps_taken: int


def solve_backward_fk(
    fields: FieldSpec,
    potential: FieldExpr,
    payoff: FieldExpr,
    T: float,
    n_t: int,
    lo,
    hi,
    n_cells,
) -> BackwardSolution:
    """March the expectation equation backward from the payoff.

    Solves, in time-to-go tau = T - t,

        u_tau = b u_x + 1/2 sigma^2 u_xx - V u,    u(tau=0) = g,

    on a 1-D grid with reflected ghost boundaries. The potential factor is
    applied as exp(-V dt) each step, so constant potentials are integrated
    exactly. Returns u at tau = T, the quantity E[exp(-int V) g(X_T) | X_0 = x]
    on the grid. Time-dependent coefficients are not supported.
    """
    if fields.d != 1 or fields.m != 1:
        raise DimensionError(f"the backward solver is 1-D, got d={fields.d}, m={fields.m}")
    if fields.uses_t or potential.uses_t or payoff.uses_t:
        raise InvalidParameterError("time-dependent coefficients are not supported by the backward solver")
    if not (np.isfinite(T) and T > 0) or n_t < 1:
        raise InvalidParameterError(f"T must be positive and n_t >= 1, got {T}, {n_t}")
    probe = ScalarGrid(np.atleast_1d(lo), np.atleast_1d(hi), np.zeros(int(np.atleast_1d(n_cells)[0])))
    xs = probe.centers(0)
    dx = float(probe.cell_sizes[0])
    b = np.broadcast_to(np.asarray(fields.drift[0](xs, 0.0, 0.0), dtype=np.float64), xs.shape)
    sig = np.broadcast_to(np.asarray(fields.diffusion[0][0](xs, 0.0, 0.0), dtype=np.float64), xs.shape)
    a = sig ** 2
    v = np.broadcast_to(np.asarray(potential(xs, 0.0, 0.0), dtype=np.float64), xs.shape)
    u = np.asarray(payoff(xs, 0.0, 0.0), dtype=np.float64)
    u = np.broadcast_to(u, xs.shape).copy()
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(sig)) and np.all(np.isfinite(v))):
        raise InvalidParameterError("coefficients or potential are not finite on the grid")
    if not np.all(np.isfinite(u)):
        raise InvalidParameterError("payoff is not finite on the grid")
    dt_max = np.inf
    amax, bmax = float(np.max(a)), float(np.max(np.abs(b)))
    if amax > 0:
        dt_max = min(dt_max, 0.25 * dx ** 2 / amax)
    if bmax > 0:
        dt_max = min(dt_max, 0.5 * dx / bmax)
    factor = _substep_factor(T / n_t, dt_max if np.isfinite(dt_max) else T / n_t)
    steps = n_t * factor
    dt = T / steps
    decay = np.exp(-v * dt)
    for step in range(steps):
        g = np.pad(u, (1, 1), mode="edge")
        ux = (g[2:] - g[:-2]) / (2.0 * dx)
        uxx = (g[2:] - 2.0 * u + g[:-2]) / dx ** 2
        u = decay * (u + dt * (b * ux + 0.5 * a * uxx))
        _check_finite(u, step)
    return BackwardSolution(
        grid=ScalarGrid(probe.lo, probe.hi, u), substep_factor=factor, steps_taken=steps
    )


def restrict_block_mean(fine: ScalarGrid, factor: int) -> ScalarGrid:
    """Average factor^d blocks of a fine grid down to a coarser grid on the
    same box. Exact for densities: block averaging preserves total mass."""
    if factor < 1:
        raise InvalidParameterError(f"factor must be >= 1, got {factor}")
    shape = fine.values.shape
    if any(n % factor for n in shape):
        raise DimensionError(f"grid shape {shape} is not divisible by factor {factor}")
    if fine.d == 1:
        coarse = fine.values.reshape(shape[0] // factor, factor).mean(axis=1)
    else:
        coarse = fine.values.reshape(shape[0] // factor, factor, shape[1] // factor, factor).mean(axis=(1, 3))
    return ScalarGrid(fine.lo, fine.hi, coarse)
