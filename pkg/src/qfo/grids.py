"""Uniform sampling grids for spatial, angular, spectral and temporal axes.

All lengths are dimensionless; the single-mode wavenumber k0 is an explicit
scenario parameter, so only products like k0*x ever matter.  Sample counts
are even so the Nyquist bin is unambiguous; the conjugate (FFT) grid of an
axis with n samples of pitch d has pitch 2*pi/(n*d) and is centered, i.e.
its first sample sits at -(n/2)*pitch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError

__all__ = ["Grid1D", "Grid2D"]


def _check_axis(n: int, d: float, name: str) -> None:
    if n < 2 or n % 2 != 0:
        raise GridError(f"{name}: sample count must be even and >= 2, got {n}")
    if not (d > 0) or not np.isfinite(d):
        raise GridError(f"{name}: pitch must be positive and finite, got {d}")


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid: n samples of pitch d starting at x0."""

    n: int
    d: float
    x0: float

    def __post_init__(self):
        _check_axis(self.n, self.d, "Grid1D")
        if not np.isfinite(self.x0):
            raise GridError(f"Grid1D: origin must be finite, got {self.x0}")

    @classmethod
    def centered(cls, n: int, d: float) -> "Grid1D":
        return cls(n, d, -(n // 2) * d)

    @property
    def coords(self) -> np.ndarray:
        return self.x0 + self.d * np.arange(self.n)

    @property
    def dk(self) -> float:
        """Pitch of the conjugate grid."""
        return 2.0 * np.pi / (self.n * self.d)

    @property
    def extent(self) -> float:
        return self.n * self.d

    def conjugate(self) -> "Grid1D":
        """Centered conjugate grid (k starts at -(n/2)*dk)."""
        return Grid1D.centered(self.n, self.dk)

    def is_centered(self, tol: float = 1e-9) -> bool:
        return abs(self.x0 + (self.n // 2) * self.d) <= tol * self.d

    def close_to(self, other: "Grid1D", tol: float = 1e-9) -> bool:
        return (
            self.n == other.n
            and abs(self.d - other.d) <= tol * self.d
            and abs(self.x0 - other.x0) <= tol * max(self.d, abs(self.x0), abs(other.x0))
        )


@dataclass(frozen=True)
class Grid2D:
    """Uniform 2D grid; axis 0 is x, axis 1 is y (values arrays are (nx, ny))."""

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float
    y0: float

    def __post_init__(self):
        _check_axis(self.nx, self.dx, "Grid2D x")
        _check_axis(self.ny, self.dy, "Grid2D y")
        if not (np.isfinite(self.x0) and np.isfinite(self.y0)):
            raise GridError("Grid2D: origins must be finite")

    @classmethod
    def centered(cls, nx: int, ny: int, dx: float, dy: float) -> "Grid2D":
        return cls(nx, ny, dx, dy, -(nx // 2) * dx, -(ny // 2) * dy)

    @property
    def xaxis(self) -> Grid1D:
        return Grid1D(self.nx, self.dx, self.x0)

    @property
    def yaxis(self) -> Grid1D:
        return Grid1D(self.ny, self.dy, self.y0)

    @property
    def x(self) -> np.ndarray:
        return self.xaxis.coords

    @property
    def y(self) -> np.ndarray:
        return self.yaxis.coords

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    @property
    def dkx(self) -> float:
        return self.xaxis.dk

    @property
    def dky(self) -> float:
        return self.yaxis.dk

    @property
    def cell(self) -> float:
        """Area of one sample cell."""
        return self.dx * self.dy

    def conjugate(self) -> "Grid2D":
        """Centered conjugate grid in (kx, ky)."""
        return Grid2D.centered(self.nx, self.ny, self.dkx, self.dky)

    def is_centered(self, tol: float = 1e-9) -> bool:
        return self.xaxis.is_centered(tol) and self.yaxis.is_centered(tol)

    def close_to(self, other: "Grid2D", tol: float = 1e-9) -> bool:
        return self.xaxis.close_to(other.xaxis, tol) and self.yaxis.close_to(
            other.yaxis, tol
        )

    def require_same(self, other: "Grid2D", what: str = "operation") -> None:
        from .errors import GridMismatchError

        if not self.close_to(other):
            raise GridMismatchError(f"{what}: grids differ ({self} vs {other})")
