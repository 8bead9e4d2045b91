"""Wavepacket constructors and domain views.

Constructors return packets normalized under the discrete inner product
(|norm^2 - 1| well below 1e-9); spectral/temporal views are the unitary
1/sqrt(2pi) transform pair from :mod:`qfo.fourier`.
"""

from __future__ import annotations

import numpy as np

from .errors import ResolutionError
from .fields import SpatialField2D, SpectralField1D
from .grids import Grid1D, Grid2D

__all__ = [
    "make_gaussian_2d",
    "superpose",
    "make_gaussian_spectrum",
    "make_rect_spectrum",
    "probability_density",
    "moment_width",
    "FAR_FIELD_WIDTH_FACTOR",
]

# Moment-based support width used by far-field guards: Delta = 3 * rms width
# about the optical axis (a +-1.5 sigma support).
FAR_FIELD_WIDTH_FACTOR = 3.0

# A Gaussian of width parameter w is considered resolved when its +-2 sigma
# support (span 4 w) covers at least this many samples.
_MIN_SAMPLES_PER_SUPPORT = 8


def make_gaussian_2d(
    grid: Grid2D,
    wx: float,
    wy: float,
    cx: float = 0.0,
    cy: float = 0.0,
    tilt_kx: float = 0.0,
    tilt_ky: float = 0.0,
) -> SpatialField2D:
    """Normalized Gaussian wavefront exp(-(x-cx)^2/2wx^2 - (y-cy)^2/2wy^2).

    A transverse tilt multiplies by exp(i(kx x + ky y)), which shifts the
    angular spectrum by (tilt_kx, tilt_ky).  Raises ResolutionError when the
    +-2 sigma support of either axis covers fewer than 8 samples.
    """
    if wx <= 0 or wy <= 0:
        raise ValueError("gaussian widths must be positive")
    if 4 * wx < _MIN_SAMPLES_PER_SUPPORT * grid.dx or 4 * wy < _MIN_SAMPLES_PER_SUPPORT * grid.dy:
        raise ResolutionError(
            f"gaussian width ({wx:g}, {wy:g}) under-resolved: need "
            f"w >= {_MIN_SAMPLES_PER_SUPPORT / 4:g} * pitch per axis"
        )
    xx, yy = grid.mesh()
    vals = np.exp(
        -((xx - cx) ** 2) / (2 * wx * wx) - ((yy - cy) ** 2) / (2 * wy * wy)
    ).astype(complex)
    if tilt_kx or tilt_ky:
        vals = vals * np.exp(1j * (tilt_kx * xx + tilt_ky * yy))
    return SpatialField2D(grid, vals).normalized()


def superpose(*fields: SpatialField2D, weights=None) -> SpatialField2D:
    """Weighted superposition, renormalized."""
    if not fields:
        raise ValueError("superpose needs at least one field")
    grid = fields[0].grid
    if weights is None:
        weights = [1.0] * len(fields)
    acc = np.zeros_like(fields[0].values)
    for f, w in zip(fields, weights):
        grid.require_same(f.grid, "superpose")
        acc = acc + w * f.values
    return SpatialField2D(grid, acc).normalized()


def make_gaussian_spectrum(grid: Grid1D, center: float, width: float) -> SpectralField1D:
    """Normalized Gaussian spectral packet exp(-(w-center)^2/2 width^2)."""
    if width <= 0:
        raise ValueError("spectral width must be positive")
    if 4 * width < _MIN_SAMPLES_PER_SUPPORT * grid.d:
        raise ResolutionError("spectral gaussian under-resolved by frequency grid")
    om = grid.coords
    vals = np.exp(-((om - center) ** 2) / (2 * width * width)).astype(complex)
    return SpectralField1D(grid, vals).normalized()


def make_rect_spectrum(grid: Grid1D, omega_lo: float, omega_hi: float) -> SpectralField1D:
    """Normalized rectangular spectral packet on [omega_lo, omega_hi]."""
    if not omega_lo < omega_hi:
        raise ValueError("rect spectrum needs omega_lo < omega_hi")
    om = grid.coords
    vals = ((om >= omega_lo) & (om <= omega_hi)).astype(complex)
    if not vals.any():
        raise ResolutionError("rect spectrum has no samples inside the band")
    return SpectralField1D(grid, vals).normalized()


def probability_density(f: SpatialField2D) -> np.ndarray:
    """Single-photon position density |xi(x,y)|^2 of a normalized wavefront.

    Nonnegative and integrates to one over the grid; invariant under any
    phase-only modulation applied upstream.
    """
    f.require_normalized(1e-6, "probability_density input")
    return np.abs(f.values) ** 2


def moment_width(f: SpatialField2D) -> tuple[float, float]:
    """Far-field support widths (Delta_x, Delta_y) = 3 * rms about the axis."""
    sx, sy = f.rms_width(about_origin=True)
    return (FAR_FIELD_WIDTH_FACTOR * sx, FAR_FIELD_WIDTH_FACTOR * sy)
