import numpy as np
import pytest

from qfo.grids import Grid2D
from qfo.fields import SpatialField2D


def gaussian_field(grid: Grid2D, w: float, cx: float = 0.0, cy: float = 0.0,
                   kx: float = 0.0, ky: float = 0.0) -> SpatialField2D:
    """Normalized Gaussian exp(-((x-cx)^2 + (y-cy)^2) / (2 w^2)), optional tilt."""
    xx, yy = grid.mesh()
    vals = np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * w * w)).astype(complex)
    if kx or ky:
        vals *= np.exp(1j * (kx * xx + ky * yy))
    f = SpatialField2D(grid, vals)
    return f.normalized()


def random_field(grid: Grid2D, rng: np.random.Generator, smooth: int = 0) -> SpatialField2D:
    """Normalized random complex field; smooth > 0 band-limits it to the inner bins."""
    vals = rng.standard_normal((grid.nx, grid.ny)) + 1j * rng.standard_normal(
        (grid.nx, grid.ny)
    )
    if smooth:
        spec = np.fft.fft2(vals)
        keep = np.zeros_like(spec, dtype=bool)
        keep[:smooth, :smooth] = keep[:smooth, -smooth:] = True
        keep[-smooth:, :smooth] = keep[-smooth:, -smooth:] = True
        vals = np.fft.ifft2(np.where(keep, spec, 0.0))
    return SpatialField2D(grid, vals).normalized()


def rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def phase_aligned_rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    """Relative L2 after optimizing a single unit-modulus global phase."""
    inner = np.vdot(b, a)
    phase = inner / abs(inner) if inner != 0 else 1.0
    return float(np.linalg.norm(a - phase * b) / np.linalg.norm(b))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
