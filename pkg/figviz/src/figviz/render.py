"""Drawing: one function per plot kind, shared color scale for density pairs.

Figures are built on an explicit Agg canvas (no pyplot, no global state) with
fixed axes boxes and a fixed palette, and saved with a constant metadata
block, so the same job and inputs always produce the same PNG bytes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .errors import DataError
from .io import atomic_write, read_table
from .jobs import TABLE_COLUMNS, RenderJob

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

_FIGSIZE = {
    "paths-1d": (8.0, 4.5),
    "paths-2d": (5.5, 5.5),
    "density-pair": (9.0, 4.0),
    "gbm": (10.0, 4.2),
}

# axes boxes in figure fractions; fixed so panel pixel positions are stable
PAIR_LEFT_BOX = (0.06, 0.12, 0.38, 0.76)
PAIR_RIGHT_BOX = (0.52, 0.12, 0.38, 0.76)
PAIR_CBAR_BOX = (0.92, 0.12, 0.02, 0.76)


@dataclass(frozen=True)
class RenderResult:
    """What was drawn: the artifact path plus per-kind scalars for checks."""

    out: Path
    kind: str
    n_series: int | None = None
    vmax: float | None = None
    panel_clims: tuple | None = None


def shared_vmax(left: np.ndarray, right: np.ndarray) -> float:
    """Color scale top shared by both panels of a density pair.

    The comparison only means anything if equal values map to equal colors,
    so the scale is the maximum over BOTH grids, never per-panel.
    """
    top = float(max(np.max(left), np.max(right)))
    if not np.isfinite(top):
        raise DataError(f"density values contain non-finite entries (max {top})")
    return top if top > 0.0 else 1.0


def _series(table: dict, value_cols: tuple[str, ...]):
    ids = np.unique(table["path_id"])
    for pid in ids:
        sel = table["path_id"] == pid
        yield pid, tuple(table[c][sel] for c in value_cols)


def _grid(table: dict, path_label: str):
    """Reassemble an i-major lattice written as (i, j, x, y, value) rows."""
    i = table["i"].astype(np.int64)
    j = table["j"].astype(np.int64)
    nx, ny = int(i.max()) + 1, int(j.max()) + 1
    if nx < 2 or ny < 2:
        raise DataError(f"{path_label}: need at least a 2x2 grid, got {nx}x{ny}")
    if i.size != nx * ny or not (
        np.array_equal(i, np.repeat(np.arange(nx), ny))
        and np.array_equal(j, np.tile(np.arange(ny), nx))
    ):
        raise DataError(f"{path_label}: rows do not form a full i-major lattice")
    xs = table["x"][::ny]
    ys = table["y"][:ny]
    values = table["value"].reshape(nx, ny)
    hx, hy = (xs[1] - xs[0]) / 2.0, (ys[1] - ys[0]) / 2.0
    extent = (xs[0] - hx, xs[-1] + hx, ys[0] - hy, ys[-1] + hy)
    return values, extent


def _draw_paths_1d(fig: Figure, job: RenderJob, tables: dict) -> dict:
    ax = fig.add_axes((0.10, 0.12, 0.86, 0.80))
    n = 0
    for pid, (t, x) in _series(tables["paths"], ("t", "x")):
        ax.plot(t, x, color=PALETTE[n % len(PALETTE)], linewidth=1.0)
        n += 1
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    if job.title:
        ax.set_title(job.title)
    return {"n_series": n}


def _draw_paths_2d(fig: Figure, job: RenderJob, tables: dict) -> dict:
    ax = fig.add_axes((0.12, 0.10, 0.84, 0.84))
    n = 0
    for pid, (x, y) in _series(tables["paths"], ("x", "y")):
        ax.plot(x, y, color=PALETTE[n % len(PALETTE)], linewidth=0.8)
        ax.plot(x[:1], y[:1], marker="o", color=PALETTE[n % len(PALETTE)], markersize=4)
        n += 1
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal", adjustable="datalim")
    if job.title:
        ax.set_title(job.title)
    return {"n_series": n}


def _draw_density_pair(fig: Figure, job: RenderJob, tables: dict) -> dict:
    left, extent_l = _grid(tables["left"], "left input")
    right, extent_r = _grid(tables["right"], "right input")
    top = shared_vmax(left, right)
    clims = []
    last_image = None
    for box, label, values, extent in (
        (PAIR_LEFT_BOX, "left", left, extent_l),
        (PAIR_RIGHT_BOX, "right", right, extent_r),
    ):
        ax = fig.add_axes(box)
        # values are indexed (x, y); imshow wants rows = y
        last_image = ax.imshow(
            values.T,
            origin="lower",
            extent=extent,
            vmin=0.0,
            vmax=top,
            cmap=job.cmap,
            interpolation="nearest",
            aspect="auto",
        )
        ax.set_title(label)
        ax.set_xlabel("x")
        if label == "left":
            ax.set_ylabel("y")
        clims.append(tuple(float(v) for v in last_image.get_clim()))
    fig.colorbar(last_image, cax=fig.add_axes(PAIR_CBAR_BOX))
    if job.title:
        fig.suptitle(job.title)
    return {"vmax": top, "panel_clims": tuple(clims)}


def _draw_gbm(fig: Figure, job: RenderJob, tables: dict) -> dict:
    ax_paths = fig.add_axes((0.07, 0.13, 0.40, 0.74))
    n = 0
    for pid, (t, s) in _series(tables["paths"], ("t", "s")):
        ax_paths.plot(t, s, color=PALETTE[n % len(PALETTE)], linewidth=1.0)
        n += 1
    ax_paths.set_xlabel("t")
    ax_paths.set_ylabel("s")
    ax_paths.set_title("sample paths")

    err = tables["strong_error"]
    dt, mean_err = err["dt"], err["mean_abs_error"]
    order = np.argsort(dt)
    dt, mean_err = dt[order], mean_err[order]
    if np.any(dt <= 0.0) or np.any(mean_err <= 0.0):
        raise DataError("strong_error rows must be positive to plot on log axes")
    ax_err = fig.add_axes((0.58, 0.13, 0.40, 0.74))
    ax_err.plot(dt, mean_err, marker="o", color=PALETTE[0], label="measured")
    reference = mean_err[0] * np.sqrt(dt / dt[0])
    ax_err.plot(dt, reference, linestyle="--", color=PALETTE[3], label="slope 1/2 reference")
    ax_err.set_xscale("log", base=2)
    ax_err.set_yscale("log")
    ax_err.set_xlabel("dt")
    ax_err.set_ylabel("mean terminal error")
    ax_err.set_title("strong convergence")
    ax_err.legend()
    if job.title:
        fig.suptitle(job.title)
    return {"n_series": n}


_DRAWERS = {
    "paths-1d": _draw_paths_1d,
    "paths-2d": _draw_paths_2d,
    "density-pair": _draw_density_pair,
    "gbm": _draw_gbm,
}


def render(job: RenderJob) -> RenderResult:
    """Validate all inputs, draw the figure, and write the PNG atomically."""
    tables = {
        role: read_table(path, TABLE_COLUMNS[(job.kind, role)])
        for role, path in sorted(job.inputs.items())
    }
    fig = Figure(figsize=_FIGSIZE[job.kind])
    FigureCanvasAgg(fig)
    info = _DRAWERS[job.kind](fig, job, tables)
    buf = io.BytesIO()
    # constant metadata so the bytes do not encode the library version
    fig.savefig(buf, format="png", dpi=job.dpi, metadata={"Software": "figviz"})
    atomic_write(job.out, buf.getvalue())
    return RenderResult(out=job.out, kind=job.kind, **info)
