"""Gaussian transition kernels and the checks built on them.

Quadrature is composite Gauss-Legendre: the integration window is split into
panels, each mapped from the reference rule. Windows cover +-10 standard
deviations of the relevant Gaussian factor, so the truncated tails are far
below the tolerances used anywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, InvalidParameterError, NumericsError
from .fieldexpr import FieldExpr, grad_fd, hessian_fd
from .rng import RngStream
from .sde import Ensemble, SdeProblem, simulate_ensemble

DEFAULT_QUAD_NODES = 400
_PANEL_ORDER = 16
_WINDOW_SIGMAS = 10.0


@dataclass(frozen=True)
class EstimateWithError:
    """A Monte Carlo estimate with its standard error."""

    mean: float
    stderr: float
    n_samples: int


@dataclass(frozen=True)
class HeatKernelParams:
    """Parameters of the heat kernel (4 pi kappa t)^(-d/2) exp(-|x-y|^2 / (4 kappa t))."""

    kappa: float
    t: float
    d: int

    def __post_init__(self):
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise InvalidParameterError(f"kappa must be positive, got {self.kappa}")
        if not (np.isfinite(self.t) and self.t > 0):
            raise InvalidParameterError(f"t must be positive, got {self.t}")
        if self.d not in (1, 2):
            raise InvalidParameterError(f"d must be 1 or 2, got {self.d}")


@lru_cache(maxsize=None)
def _reference_rule(order: int):
    return np.polynomial.legendre.leggauss(order)


def composite_gauss_legendre(a: float, b: float, n_panels: int, order: int = _PANEL_ORDER):
    """Nodes and weights of a panel-composite Gauss-Legendre rule on [a, b]."""
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise InvalidParameterError(f"need a < b, got [{a}, {b}]")
    if n_panels < 1 or order < 1:
        raise InvalidParameterError(f"n_panels and order must be positive, got {n_panels}, {order}")
    xr, wr = _reference_rule(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xr[None, :]).ravel()
    weights = (half[:, None] * wr[None, :]).ravel()
    return nodes, weights


def bm_transition_density(t: float, x, y):
    """Brownian transition density p(t, x, y) in the dimension of x."""
    if not (np.isfinite(t) and t > 0):
        raise InvalidParameterError(f"t must be positive, got {t}")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"x and y must be equal-length vectors, got {x.shape}, {y.shape}")
    d = x.size
    sq = float(np.sum((y - x) ** 2))
    return float((2.0 * np.pi * t) ** (-d / 2.0) * np.exp(-sq / (2.0 * t)))


def _gaussian_1d(t: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (2.0 * np.pi * t) ** -0.5 * np.exp(-((y - x) ** 2) / (2.0 * t))


def chapman_kolmogorov_gap(s: float, t: float, x: float, y: float, n_nodes: int = DEFAULT_QUAD_NODES) -> float:
    """|p(s+t, x, y) - int p(s, x, z) p(t, z, y) dz| for 1-D Brownian motion.

    The intermediate integral runs over x +- 10 sqrt(s+t) with a panel count
    adapted to the narrowest Gaussian factor. The quadrature is validated by
    doubling the panel count; disagreement raises NumericsError.
    """
    if not (np.isfinite(s) and s > 0 and np.isfinite(t) and t > 0):
        raise InvalidParameterError(f"s and t must be positive, got {s}, {t}")
    width_sigma = np.sqrt(s + t)
    a, b = x - _WINDOW_SIGMAS * width_sigma, x + _WINDOW_SIGMAS * width_sigma
    sigma_min = np.sqrt(s * t / (s + t))
    needed = int(np.ceil((b - a) / (0.5 * sigma_min)))
    cap = max(n_nodes // _PANEL_ORDER, 1) * 64
    if needed > cap:
        # A spike narrower than the affordable panel width slips between the
        # nodes at every resolution, so the doubling check below cannot see it.
        raise NumericsError(
            f"time scales s={s:g}, t={t:g} need {needed} panels to resolve the "
            f"narrow factor but only {cap} are affordable at n_nodes={n_nodes}"
        )
    base_panels = max(DEFAULT_QUAD_NODES // _PANEL_ORDER, needed)

    def integral(n_panels: int) -> float:
        z, w = composite_gauss_legendre(a, b, n_panels)
        return float(np.sum(w * _gaussian_1d(s, np.float64(x), z) * _gaussian_1d(t, z, np.float64(y))))

    i1 = integral(base_panels)
    i2 = integral(2 * base_panels)
    if abs(i1 - i2) > max(1e-10, 1e-12 * abs(i2)):
        raise NumericsError(
            f"Chapman-Kolmogorov quadrature did not converge: {i1!r} vs {i2!r} at {base_panels} panels"
        )
    return abs(bm_transition_density(s + t, [x], [y]) - i2)


def _eval_spatial(f, pts_x: np.ndarray, pts_y=None) -> np.ndarray:
    if isinstance(f, FieldExpr):
        out = f(pts_x, 0.0 if pts_y is None else pts_y, 0.0)
    elif pts_y is None:
        out = f(pts_x)
    else:
        out = f(pts_x, pts_y)
    return np.broadcast_to(np.asarray(out, dtype=np.float64), pts_x.shape)


def heat_solution(f, x, t: float, kappa: float = 0.5, n_nodes: int = DEFAULT_QUAD_NODES) -> float:
    """Kernel representation of the heat semigroup: integrate f against the
    heat kernel of diffusivity kappa centered at x.

    f is a FieldExpr in the spatial variables or a plain callable; x has one
    or two components. f must evaluate to finite values on the quadrature
    window (checked on the node set).
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    params = HeatKernelParams(kappa=float(kappa), t=float(t), d=x.size)
    sigma = np.sqrt(2.0 * params.kappa * params.t)
    n_panels = max(n_nodes // _PANEL_ORDER, 1)
    rules = [
        composite_gauss_legendre(x[i] - _WINDOW_SIGMAS * sigma, x[i] + _WINDOW_SIGMAS * sigma, n_panels)
        for i in range(x.size)
    ]
    var = 2.0 * params.kappa * params.t
    if x.size == 1:
        z, w = rules[0]
        fv = _eval_spatial(f, z)
        if not np.all(np.isfinite(fv)):
            raise InvalidParameterError("f is not finite on the quadrature window")
        kernel = (2.0 * np.pi * var) ** -0.5 * np.exp(-((z - x[0]) ** 2) / (2.0 * var))
        return float(np.sum(w * kernel * fv))
    zx, wx = rules[0]
    zy, wy = rules[1]
    gx, gy = np.meshgrid(zx, zy, indexing="ij")
    fv = _eval_spatial(f, gx, gy)
    if not np.all(np.isfinite(fv)):
        raise InvalidParameterError("f is not finite on the quadrature window")
    kernel = (2.0 * np.pi * var) ** -1.0 * np.exp(
        -((gx - x[0]) ** 2 + (gy - x[1]) ** 2) / (2.0 * var)
    )
    return float(wx @ (kernel * fv) @ wy)


def stochastic_representation(
    f,
    x,
    t: float,
    kappa: float = 0.5,
    n_paths: int = 10_000,
    seed: int = 0,
    n_steps: int = 1,
    block_paths: int = 8192,
) -> EstimateWithError:
    """Monte Carlo counterpart of heat_solution: average f at Gaussian
    endpoints x + sqrt(2 kappa) W_t, path i driven by stream_id = i.

    The endpoint is reached through n_steps equal Brownian increments, so the
    draw order matches path-based estimators using the same discretization.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    HeatKernelParams(kappa=float(kappa), t=float(t), d=x.size)
    if n_paths < 2:
        raise InvalidParameterError(f"n_paths must be >= 2, got {n_paths}")
    if n_steps < 1:
        raise InvalidParameterError(f"n_steps must be >= 1, got {n_steps}")
    d = x.size
    sqdt = np.sqrt(t / n_steps)
    scale = np.sqrt(2.0 * kappa)
    values = np.empty(n_paths, dtype=np.float64)
    for start in range(0, n_paths, block_paths):
        stop = min(start + block_paths, n_paths)
        z = np.empty((stop - start, n_steps * d), dtype=np.float64)
        for i in range(start, stop):
            z[i - start] = RngStream(seed, i).normals(n_steps * d)
        w_t = z.reshape(stop - start, n_steps, d).sum(axis=1) * sqdt
        pts = x + scale * w_t
        fv = _eval_spatial(f, pts[:, 0], pts[:, 1] if d > 1 else None)
        values[start:stop] = fv
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values)))
        raise InvalidParameterError(f"f produced a non-finite value (path {bad})")
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / np.sqrt(n_paths))
    return EstimateWithError(mean=mean, stderr=stderr, n_samples=n_paths)


def apply_generator(fields, f, x, t: float = 0.0, h=None) -> float:
    """Generator of the diffusion applied to f at x:
    b . grad f + 1/2 (sigma sigma^T) : hess f, derivatives by central
    differences."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    d = fields.d
    if x.size != d:
        raise DimensionError(f"x must have {d} components, got {x.size}")
    xs = float(x[0])
    ys = float(x[1]) if d > 1 else 0.0
    b = np.array([fields.drift[i](xs, ys, t) for i in range(d)], dtype=np.float64)
    sig = np.array(
        [[fields.diffusion[i][j](xs, ys, t) for j in range(fields.m)] for i in range(d)],
        dtype=np.float64,
    )
    a = sig @ sig.T
    grad = grad_fd(f, x, t=t, h=h)
    hess = hessian_fd(f, x, t=t, h=h)
    return float(b @ grad + 0.5 * np.sum(a * hess))


def generator_limit_gap(
    fields,
    f,
    x,
    h: float,
    n_paths: int = 200_000,
    seed: int = 0,
    n_substeps: int = 8,
) -> float:
    """|(E[f(X_h)] - f(x)) / h - (generator f)(x)| estimated by simulation.

    X_h is advanced with n_substeps Euler steps so the one-step scheme bias
    does not mask the O(h) semigroup defect being measured.
    """
    if not (np.isfinite(h) and h > 0):
        raise InvalidParameterError(f"h must be positive, got {h}")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    problem = SdeProblem(fields=fields, x0=x, T=h, n_steps=n_substeps)
    result = simulate_ensemble(Ensemble(problem=problem, n_paths=n_paths, seed=seed))
    pts = result.terminal
    fv = _eval_spatial(f, pts[:, 0], pts[:, 1] if fields.d > 1 else None)
    f0 = _eval_spatial(f, np.atleast_1d(x[0]), np.atleast_1d(x[1]) if fields.d > 1 else None)[0]
    rate = (float(np.mean(fv)) - float(f0)) / h
    return abs(rate - apply_generator(fields, f, x))
