"""figviz: render diffuselab CSV artifacts into publication-style figures.

Four plot kinds cover the workbench's outputs: paths-1d and paths-2d draw one
polyline per path_id, density-pair draws two heatmaps on one shared color
scale with a single colorbar, and gbm pairs sample paths with a log-log
strong-convergence chart. Rendering is pure consumption: inputs are CSV/JSON
files on disk, the output is a PNG written atomically, and identical inputs
always produce identical bytes.
"""

from .errors import DataError, FigvizError, JobError
from .io import atomic_write, read_table
from .jobs import KINDS, REQUIRED_INPUTS, TABLE_COLUMNS, RenderJob, job_from_dict, load_job
from .render import PALETTE, RenderResult, render, shared_vmax

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "FigvizError",
    "JobError",
    "KINDS",
    "PALETTE",
    "REQUIRED_INPUTS",
    "RenderJob",
    "RenderResult",
    "TABLE_COLUMNS",
    "atomic_write",
    "job_from_dict",
    "load_job",
    "read_table",
    "render",
    "shared_vmax",
    "__version__",
]
