"""Render job documents: what to draw, from which tables, into which file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import JobError

KINDS = ("paths-1d", "paths-2d", "density-pair", "gbm")

# input roles each kind needs, and the exact CSV header behind each role
REQUIRED_INPUTS = {
    "paths-1d": ("paths",),
    "paths-2d": ("paths",),
    "density-pair": ("left", "right"),
    "gbm": ("paths", "strong_error"),
}
TABLE_COLUMNS = {
    ("paths-1d", "paths"): ("path_id", "step", "t", "x"),
    ("paths-2d", "paths"): ("path_id", "step", "t", "x", "y"),
    ("density-pair", "left"): ("i", "j", "x", "y", "value"),
    ("density-pair", "right"): ("i", "j", "x", "y", "value"),
    ("gbm", "paths"): ("path_id", "step", "t", "s"),
    ("gbm", "strong_error"): ("dt", "mean_abs_error"),
}
_OPTIONAL_KEYS = {"title", "dpi", "cmap"}


@dataclass(frozen=True)
class RenderJob:
    """One figure to render.

    inputs maps the kind's roles to CSV paths; out is the PNG destination.
    Relative paths in a job file are resolved against the file's directory.
    """

    kind: str
    inputs: dict[str, Path]
    out: Path
    title: str | None = None
    dpi: int = 100
    cmap: str = "viridis"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise JobError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        roles = REQUIRED_INPUTS[self.kind]
        if tuple(sorted(self.inputs)) != tuple(sorted(roles)):
            raise JobError(
                f"kind {self.kind!r} needs inputs {sorted(roles)}, got {sorted(self.inputs)}"
            )
        if not (isinstance(self.dpi, int) and 10 <= self.dpi <= 600):
            raise JobError(f"dpi must be an integer in [10, 600], got {self.dpi}")
        object.__setattr__(self, "inputs", {k: Path(v) for k, v in self.inputs.items()})
        object.__setattr__(self, "out", Path(self.out))


def job_from_dict(doc: dict, base_dir: Path | None = None) -> RenderJob:
    if not isinstance(doc, dict):
        raise JobError(f"job document must be an object, got {type(doc).__name__}")
    required = {"kind", "inputs", "out"}
    missing = required - set(doc)
    if missing:
        raise JobError(f"job document is missing {sorted(missing)}")
    unknown = set(doc) - required - _OPTIONAL_KEYS
    if unknown:
        raise JobError(f"job document has unknown keys {sorted(unknown)}")
    inputs = doc["inputs"]
    if not isinstance(inputs, dict) or not all(isinstance(v, str) for v in inputs.values()):
        raise JobError("inputs must map role names to path strings")
    base = Path(base_dir) if base_dir is not None else Path(".")

    def resolve(p: str) -> Path:
        path = Path(p)
        return path if path.is_absolute() else base / path

    return RenderJob(
        kind=doc["kind"],
        inputs={role: resolve(p) for role, p in inputs.items()},
        out=resolve(doc["out"]),
        title=doc.get("title"),
        dpi=doc.get("dpi", 100),
        cmap=doc.get("cmap", "viridis"),
    )


def load_job(path: Path) -> RenderJob:
    """Load a job JSON; relative input/output paths resolve against the job
    file's own directory so job files can ship next to their data."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise JobError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise JobError(f"{path} is not valid JSON: {exc}") from exc
    return job_from_dict(doc, base_dir=path.parent)
