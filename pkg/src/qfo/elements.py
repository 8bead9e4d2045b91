"""Elementary unitaries on wavefronts: free-space displacement (exact,
Fresnel, Fraunhofer), spatial phase masks (generic, lens, grating) and the
grating Fourier analysis.

Propagation direction conventions: displacement by z multiplies each plane
wave by exp(+i kz z) with the paraxial kz ~ k0 (1 - (kx^2 + ky^2)/(2 k0^2));
masks multiply the wavefront by exp(-i phi(x, y)).  Both are pure phases, so
every element here preserves the wavepacket norm exactly (up to the stated
grating truncation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AliasingGuardError,
    FarFieldError,
    GridMismatchError,
    NyquistError,
    ResolutionError,
)
from .fields import AngularField2D, SpatialField2D
from .fourier import forward_ft2, inverse_ft2, zoom_ft2
from .grids import Grid2D
from .wavepackets import moment_width

__all__ = [
    "FresnelKernel",
    "fresnel_z_limit",
    "fresnel_propagate",
    "fresnel_impulse_response",
    "exact_propagate",
    "far_field_threshold",
    "fraunhofer_propagate",
    "PhaseMask",
    "apply_phase_mask",
    "lens_phase",
    "GratingSpec",
    "grating_coefficients",
    "grating_diffract",
    "require_band_limited",
]

FAR_FIELD_ENFORCE_RATIO = 20.0
_BAND_TOL = 1e-12


def require_band_limited(spec: AngularField2D, k0: float, what: str) -> None:
    frac = spec.power_beyond(k0)
    if frac >= _BAND_TOL:
        raise NyquistError(
            f"{what}: input carries {frac:.3e} of its power at |k| >= k0={k0:g} "
            "(evanescent / non-paraxial content)"
        )


def fresnel_z_limit(grid: Grid2D, k0: float) -> float:
    """Largest |z| whose transfer-function phase stays Nyquist-sampled.

    The kernel's local phase increment per conjugate-grid sample is
    |z| k_edge dk / k0 per axis; requiring it <= pi at the grid edge gives
    z_max = pi k0 / (k_edge dk).  For a centered square grid this is
    n dx^2 k0 / (2 pi); propagation at exactly z_max is critically sampled
    and allowed.
    """
    kg = grid.conjugate()
    zx = np.pi * k0 / (max(abs(kg.x[0]), abs(kg.x[-1])) * kg.dx)
    zy = np.pi * k0 / (max(abs(kg.y[0]), abs(kg.y[-1])) * kg.dy)
    return float(min(zx, zy))


@dataclass(frozen=True)
class FresnelKernel:
    """Cached paraxial transfer function exp(i k0 (1 - k^2/(2 k0^2)) z)."""

    z: float
    k0: float
    grid: Grid2D
    transfer: np.ndarray

    @classmethod
    def build(cls, grid: Grid2D, z: float, k0: float) -> "FresnelKernel":
        kx, ky = grid.conjugate().mesh()
        phase = k0 * z * (1.0 - (kx**2 + ky**2) / (2.0 * k0**2))
        return cls(z, k0, grid, np.exp(1j * phase))


def fresnel_propagate(
    f: SpatialField2D,
    z: float,
    k0: float,
    *,
    kernel: FresnelKernel | None = None,
    check_band: bool = True,
) -> SpatialField2D:
    """Free-space displacement by z in the paraxial regime.

    Multiplies the angular spectrum by the Fresnel transfer function and
    transforms back; norm-exact, and kernels compose: z1 then z2 equals
    z1 + z2.  Rejects |z| beyond the aliasing limit of the grid
    (AliasingGuardError reports the largest safe z) and non-band-limited
    inputs.
    """
    z_max = fresnel_z_limit(f.grid, k0)
    if abs(z) > z_max * (1.0 + 1e-12):
        raise AliasingGuardError(z, z_max)
    spec = forward_ft2(f)
    if check_band:
        require_band_limited(spec, k0, "fresnel_propagate")
    if kernel is None or kernel.z != z or kernel.k0 != k0 or not kernel.grid.close_to(f.grid):
        kernel = FresnelKernel.build(f.grid, z, k0)
    return inverse_ft2(
        AngularField2D(spec.grid, spec.values * kernel.transfer, src_grid=f.grid)
    )


def fresnel_impulse_response(grid: Grid2D, z: float, k0: float) -> SpatialField2D:
    """Sampled free-space impulse response (-i k0/z) e^{i k0 z} e^{i k0 r^2 / 2z}.

    Convolving the input wavefront with this kernel reproduces
    fresnel_propagate; the chirp is Nyquist-sampled across the whole grid
    only near the aliasing-limit distance, so the two paths are compared
    there.  Not normalizable (|h| = k0/|z| everywhere).
    """
    if z == 0:
        raise ValueError("impulse response undefined at z = 0")
    xx, yy = grid.mesh()
    vals = (-1j * k0 / z) * np.exp(1j * k0 * z) * np.exp(
        1j * k0 * (xx**2 + yy**2) / (2.0 * z)
    )
    return SpatialField2D(grid, vals)


def exact_propagate(f: SpatialField2D, z: float, k0: float) -> SpatialField2D:
    """Cross-check kernel with the exact kz = sqrt(k0^2 - kx^2 - ky^2).

    Not a primary path: it exists to bound the paraxial error of
    fresnel_propagate on band-limited fields.  Evanescent samples
    (k > k0) are attenuated by their exact decay; the band-limit guard keeps
    their power below 1e-12, so the map is unitary to that level.
    """
    z_max = fresnel_z_limit(f.grid, k0)
    if abs(z) > z_max * (1.0 + 1e-12):
        raise AliasingGuardError(z, z_max)
    spec = forward_ft2(f)
    require_band_limited(spec, k0, "exact_propagate")
    kx, ky = spec.grid.mesh()
    arg = k0**2 - kx**2 - ky**2
    kz = np.sqrt(np.maximum(arg, 0.0))
    decay = np.sqrt(np.maximum(-arg, 0.0))
    transfer = np.exp(1j * kz * z - decay * abs(z))
    return inverse_ft2(
        AngularField2D(spec.grid, spec.values * transfer, src_grid=f.grid)
    )


def far_field_threshold(f: SpatialField2D, k0: float) -> float:
    """Near/far boundary (k0/8)(Dx^2 + Dy^2) with moment-based support widths."""
    dx_w, dy_w = moment_width(f)
    return (k0 / 8.0) * (dx_w**2 + dy_w**2)


def fraunhofer_propagate(
    f: SpatialField2D, z: float, k0: float, *, on_input_grid: bool = False
) -> SpatialField2D:
    """Far-field form: rescaled Fourier transform with the spherical phase.

    xi_z(x, y) = (-i k0/z) e^{i k0 z} e^{i k0 r^2/2z} xi~(k0 x/z, k0 y/z).

    By default the output lives on the natural far-field lattice
    x = (z/k0) * k (pitch z dk / k0), where the sampling is the conjugate
    grid itself and the norm is preserved exactly.  With ``on_input_grid``
    the closed form is instead evaluated on the input lattice by an exact
    zoom transform, directly comparable with fresnel_propagate, at the cost
    of seeing only the central window of the pattern.  Requires z at least
    20x the far-field threshold.
    """
    if z <= 0:
        raise ValueError("fraunhofer_propagate needs z > 0")
    z_min = FAR_FIELD_ENFORCE_RATIO * far_field_threshold(f, k0)
    if z < z_min:
        raise FarFieldError(z, z_min)
    g = f.grid
    if on_input_grid:
        spec = zoom_ft2(f, k0 * g.x / z, k0 * g.y / z)
        xx, yy = g.mesh()
        vals = (-1j * k0 / z) * np.exp(1j * k0 * z) * np.exp(
            1j * k0 * (xx**2 + yy**2) / (2.0 * z)
        ) * spec
        return SpatialField2D(g, vals)
    from .fourier import rescale_field

    spec = forward_ft2(f)
    scaled = rescale_field(
        SpatialField2D(spec.grid, spec.values), k0 / z, k0 / z
    )
    xx, yy = scaled.grid.mesh()
    vals = -1j * np.exp(1j * k0 * z) * np.exp(
        1j * k0 * (xx**2 + yy**2) / (2.0 * z)
    ) * scaled.values
    return SpatialField2D(scaled.grid, vals)


@dataclass(frozen=True)
class PhaseMask:
    """Phase-only spatial modulator; caches the unit-modulus factor e^{-i phi}."""

    grid: Grid2D
    phi: np.ndarray
    factor: np.ndarray

    @classmethod
    def from_phase(cls, grid: Grid2D, phi: np.ndarray) -> "PhaseMask":
        phi = np.asarray(phi, dtype=np.float64)
        if phi.shape != (grid.nx, grid.ny):
            raise GridMismatchError("phase array shape does not match grid")
        return cls(grid, phi, np.exp(-1j * phi))


def apply_phase_mask(f: SpatialField2D, mask: PhaseMask) -> SpatialField2D:
    """Pointwise xi -> xi e^{-i phi}; leaves |xi| and the density unchanged."""
    f.grid.require_same(mask.grid, "apply_phase_mask")
    return SpatialField2D(f.grid, f.values * mask.factor)


def lens_phase(grid: Grid2D, f_len: float, k0: float) -> PhaseMask:
    """Thin-lens quadratic phase phi(x, y) = (k0 / 2f) (x^2 + y^2)."""
    if f_len == 0:
        raise ValueError("lens focal length must be nonzero")
    xx, yy = grid.mesh()
    return PhaseMask.from_phase(grid, (k0 / (2.0 * f_len)) * (xx**2 + yy**2))


@dataclass(frozen=True)
class GratingSpec:
    """Fourier data of a periodic phase grating e^{-i phi_g(x)}.

    ``orders[i]`` is the coefficient g_r for r = i - max_order; ``power`` is
    the retained sum(|g_r|^2) and ``tail`` its complement (the phase-only
    factor has unit total power).
    """

    period: float
    max_order: int
    orders: np.ndarray
    power: float

    @property
    def kappa(self) -> float:
        return 2.0 * np.pi / self.period

    @property
    def tail(self) -> float:
        return max(0.0, 1.0 - self.power)

    def coefficient(self, r: int) -> complex:
        return complex(self.orders[r + self.max_order])


def grating_coefficients(
    phi_samples: np.ndarray, period: float, max_order: int
) -> GratingSpec:
    """Fourier coefficients of e^{-i phi_g} from one exactly-sampled period.

    Uniform sampling of a full period makes the trapezoid rule collapse to
    the DFT, which is spectrally exact for periodic integrands; requires at
    least 16 samples per retained order.
    """
    phi = np.asarray(phi_samples, dtype=np.float64)
    if phi.ndim != 1:
        raise ValueError("grating phase must be a 1D array over one period")
    if max_order < 0 or period <= 0:
        raise ValueError("grating needs period > 0 and max_order >= 0")
    m = phi.size
    if m < 16 * max(1, max_order):
        raise ResolutionError(
            f"grating period sampled with {m} points; need >= {16 * max(1, max_order)}"
        )
    coeffs = np.fft.fft(np.exp(-1j * phi)) / m
    r = np.arange(-max_order, max_order + 1)
    orders = coeffs[r % m]
    power = float(np.sum(np.abs(orders) ** 2))
    return GratingSpec(period, max_order, orders, power)


def grating_diffract(f: SpatialField2D, g: GratingSpec) -> SpatialField2D:
    """Apply the truncated grating factor sum_r g_r e^{i r kappa x}.

    Each retained order shifts the angular spectrum by r * kappa in kx with
    weight g_r.  Rejects the call when an order would push the occupied band
    past the grid Nyquist edge (that energy would wrap around).
    """
    spec = forward_ft2(f)
    kxg = spec.grid.x
    power = np.sum(np.abs(spec.values) ** 2, axis=1)
    occupied = power > _BAND_TOL * power.sum()
    k_sup = float(np.max(np.abs(kxg[occupied]))) if occupied.any() else 0.0
    k_edge = float(max(abs(kxg[0]), abs(kxg[-1])))
    if k_sup + g.max_order * g.kappa > k_edge:
        raise NyquistError(
            f"grating order {g.max_order} would shift the occupied band "
            f"(|kx| <= {k_sup:g}) past the grid edge {k_edge:g}"
        )
    x = f.grid.x
    series = np.zeros(x.size, dtype=complex)
    for i, r in enumerate(range(-g.max_order, g.max_order + 1)):
        series += g.orders[i] * np.exp(1j * r * g.kappa * x)
    return SpatialField2D(f.grid, f.values * series[:, None])
