"""Sampled complex wavepacket carriers in the four working domains.

A wavepacket is stored as complex amplitudes on a uniform grid together
with the grid metadata.  The discrete inner product <f, g> = sum(conj(f)*g)
* cell stands in for the continuous one, so a normalized field has
norm_sq == 1 and two fields are orthogonal when the product vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GridMismatchError, NormalizationError
from .grids import Grid1D, Grid2D

__all__ = [
    "SpatialField2D",
    "AngularField2D",
    "SpectralField1D",
    "TemporalField1D",
    "SeparablePacket",
]


def _as_complex(values: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.shape != shape:
        raise ValueError(f"values shape {arr.shape} does not match grid shape {shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("field values must be finite")
    return arr


@dataclass(frozen=True)
class SpatialField2D:
    """Wavefront xi(x, y); |xi|^2 integrates to 1 for a normalized packet."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _as_complex(self.values, (self.grid.nx, self.grid.ny))
        )

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell)

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq))

    def inner(self, other: "SpatialField2D") -> complex:
        self.grid.require_same(other.grid, "inner product")
        return complex(np.vdot(self.values, other.values) * self.grid.cell)

    def normalized(self) -> "SpatialField2D":
        n = self.norm
        if n <= 0 or not np.isfinite(n):
            raise NormalizationError("cannot normalize a zero-norm field")
        return replace(self, values=self.values / n)

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return abs(self.norm_sq - 1.0) <= tol

    def require_normalized(self, tol: float = 1e-6, what: str = "field") -> None:
        if abs(self.norm_sq - 1.0) > tol:
            raise NormalizationError(
                f"{what} must be normalized; norm^2 = {self.norm_sq!r}"
            )

    def scaled(self, factor: complex) -> "SpatialField2D":
        return replace(self, values=self.values * factor)

    def centroid(self) -> tuple[float, float]:
        """First moments of |xi|^2 (probability-weighted position)."""
        w = np.abs(self.values) ** 2
        tot = w.sum()
        if tot == 0:
            return (0.0, 0.0)
        xx, yy = self.grid.mesh()
        return (float((w * xx).sum() / tot), float((w * yy).sum() / tot))

    def rms_width(self, about_origin: bool = False) -> tuple[float, float]:
        """Second-moment widths of |xi|^2 per axis.

        With ``about_origin`` the moments are taken about x = y = 0 (used by
        the far-field guard, which cares about extent from the optical axis);
        otherwise about the centroid.
        """
        w = np.abs(self.values) ** 2
        tot = w.sum()
        if tot == 0:
            return (0.0, 0.0)
        xx, yy = self.grid.mesh()
        if about_origin:
            cx = cy = 0.0
        else:
            cx, cy = self.centroid()
        sx = np.sqrt(((xx - cx) ** 2 * w).sum() / tot)
        sy = np.sqrt(((yy - cy) ** 2 * w).sum() / tot)
        return (float(sx), float(sy))


@dataclass(frozen=True)
class AngularField2D:
    """Angular spectrum xi~(kx, ky) with the spatial grid it came from.

    ``src_grid`` pins the exact spatial lattice for the inverse transform;
    for hand-built spectra it defaults to the centered dual of ``grid``.
    """

    grid: Grid2D
    values: np.ndarray
    src_grid: Grid2D = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(
            self, "values", _as_complex(self.values, (self.grid.nx, self.grid.ny))
        )
        if self.src_grid is None:
            object.__setattr__(self, "src_grid", self.grid.conjugate())

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell)

    def power_beyond(self, k_radius: float) -> float:
        """Fraction of total power at kx^2 + ky^2 >= k_radius^2."""
        kx, ky = self.grid.mesh()
        w = np.abs(self.values) ** 2
        tot = w.sum()
        if tot == 0:
            return 0.0
        return float(w[kx**2 + ky**2 >= k_radius**2].sum() / tot)

    def band_limited(self, k0: float, tol: float = 1e-12) -> bool:
        """True iff power at |k| >= k0 is below ``tol`` of the total."""
        return self.power_beyond(k0) < tol

    def scaled(self, factor: complex) -> "AngularField2D":
        return replace(self, values=self.values * factor)


def _support_1d(coords: np.ndarray, values: np.ndarray, tol: float) -> tuple[float, float]:
    w = np.abs(values) ** 2
    tot = w.sum()
    if tot == 0:
        return (float("nan"), float("nan"))
    idx = np.nonzero(w > tol * tot)[0]
    if idx.size == 0:
        return (float("nan"), float("nan"))
    return (float(coords[idx[0]]), float(coords[idx[-1]]))


@dataclass(frozen=True)
class SpectralField1D:
    """Spectral wavepacket xi(omega) on a uniform frequency grid."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_complex(self.values, (self.grid.n,)))

    @property
    def omega(self) -> np.ndarray:
        return self.grid.coords

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.d)

    def inner(self, other: "SpectralField1D") -> complex:
        if not self.grid.close_to(other.grid):
            raise GridMismatchError("spectral inner product: grids differ")
        return complex(np.vdot(self.values, other.values) * self.grid.d)

    def normalized(self) -> "SpectralField1D":
        n = np.sqrt(self.norm_sq)
        if n <= 0 or not np.isfinite(n):
            raise NormalizationError("cannot normalize a zero-norm packet")
        return replace(self, values=self.values / n)

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return abs(self.norm_sq - 1.0) <= tol

    def support(self, tol: float = 1e-12) -> tuple[float, float]:
        """(omega_min, omega_max) where per-sample |amp|^2 exceeds tol of total."""
        return _support_1d(self.omega, self.values, tol)

    @property
    def bandwidth(self) -> float:
        lo, hi = self.support()
        return hi - lo

    def rms_width(self) -> float:
        """Second-moment width of |xi(omega)|^2 about its centroid."""
        w = np.abs(self.values) ** 2
        tot = w.sum()
        om = self.omega
        c = (w * om).sum() / tot
        return float(np.sqrt(((om - c) ** 2 * w).sum() / tot))


@dataclass(frozen=True)
class TemporalField1D:
    """Time-domain wavepacket; the Fourier dual of a SpectralField1D."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_complex(self.values, (self.grid.n,)))

    @property
    def t(self) -> np.ndarray:
        return self.grid.coords

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.d)

    def rms_width(self) -> float:
        w = np.abs(self.values) ** 2
        tot = w.sum()
        t = self.t
        c = (w * t).sum() / tot
        return float(np.sqrt(((t - c) ** 2 * w).sum() / tot))

    def peak_time(self) -> float:
        return float(self.t[int(np.argmax(np.abs(self.values)))])


@dataclass(frozen=True)
class SeparablePacket:
    """Wavepacket separable into independently normalized spectral and spatial factors."""

    spectral: SpectralField1D
    spatial: SpatialField2D

    def __post_init__(self):
        if not self.spectral.is_normalized(1e-6):
            raise NormalizationError("spectral factor of a separable packet must be normalized")
        if not self.spatial.is_normalized(1e-6):
            raise NormalizationError("spatial factor of a separable packet must be normalized")
