from pathlib import Path

import numpy as np
import pytest


@pytest.fixture(scope="session")
def golden() -> Path:
    return Path(__file__).parent / "golden"


@pytest.fixture
def write_grid_csv(tmp_path):
    """Write a (nx, ny) value array as the i-major lattice CSV the density
    experiments produce."""

    def _write(name: str, values: np.ndarray) -> Path:
        values = np.asarray(values, dtype=np.float64)
        nx, ny = values.shape
        xs = np.linspace(-1.0, 1.0, nx)
        ys = np.linspace(-1.0, 1.0, ny)
        lines = ["i,j,x,y,value"]
        for i in range(nx):
            for j in range(ny):
                lines.append(f"{i},{j},{float(xs[i])!r},{float(ys[j])!r},{float(values[i, j])!r}")
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write
