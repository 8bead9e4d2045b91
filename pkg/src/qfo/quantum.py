"""Fock-space layer: photon statistics carried invariantly through unitaries.

A quantum light state pairs a Fock representation (coherent amplitude, photon
number, or an explicit coefficient list) with a wavepacket.  Linear optical
elements transform only the wavepacket; the representation object is passed
through untouched, so photon-number statistics are bit-identical before and
after any bench.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.special import gammaln

from .errors import NonUnitaryMapError, NormalizationError
from .fields import SeparablePacket, SpatialField2D, SpectralField1D

__all__ = [
    "FockRepr",
    "QuantumLightState",
    "NumberDistribution",
    "photon_number_distribution",
    "apply_unitary",
    "joint_detection_density",
]

Packet = Union[SpatialField2D, SpectralField1D, SeparablePacket]

_GENERIC_NORM_TOL = 1e-12
_UNITARY_TOL = 1e-6


@dataclass(frozen=True)
class FockRepr:
    """coherent(alpha) | fock(n) | generic(c_n) photon statistics.

    Coherent states store alpha exactly; their number coefficients
    e^{-|alpha|^2/2} alpha^n / sqrt(n!) are derived on demand.  Generic
    coefficient lists must satisfy sum |c_n|^2 = 1 within 1e-12.
    """

    kind: str
    alpha: complex = 0j
    n: int = 0
    coeffs: np.ndarray | None = None

    @classmethod
    def coherent(cls, alpha: complex) -> "FockRepr":
        return cls(kind="coherent", alpha=complex(alpha))

    @classmethod
    def fock(cls, n: int) -> "FockRepr":
        if n < 0 or int(n) != n:
            raise ValueError("fock photon number must be a nonnegative integer")
        return cls(kind="fock", n=int(n))

    @classmethod
    def generic(cls, coeffs) -> "FockRepr":
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("generic representation needs a 1D coefficient list")
        total = float(np.sum(np.abs(c) ** 2))
        if abs(total - 1.0) > _GENERIC_NORM_TOL:
            raise NormalizationError(
                f"generic Fock coefficients must have unit power; got {total!r}"
            )
        return cls(kind="generic", coeffs=c)

    def coefficients(self, n_max: int) -> np.ndarray:
        """c_n for n = 0..n_max."""
        ns = np.arange(n_max + 1)
        if self.kind == "fock":
            c = np.zeros(n_max + 1, dtype=complex)
            if self.n <= n_max:
                c[self.n] = 1.0
            return c
        if self.kind == "coherent":
            a = self.alpha
            if a == 0:
                c = np.zeros(n_max + 1, dtype=complex)
                c[0] = 1.0
                return c
            mag = np.exp(-abs(a) ** 2 / 2 + ns * np.log(abs(a)) - 0.5 * gammaln(ns + 1))
            return mag * np.exp(1j * ns * np.angle(a))
        c = np.zeros(n_max + 1, dtype=complex)
        m = min(n_max + 1, self.coeffs.size)
        c[:m] = self.coeffs[:m]
        return c

    def mean_photon_number(self) -> float:
        if self.kind == "fock":
            return float(self.n)
        if self.kind == "coherent":
            return float(abs(self.alpha) ** 2)
        ns = np.arange(self.coeffs.size)
        return float(np.sum(ns * np.abs(self.coeffs) ** 2))


@dataclass(frozen=True)
class NumberDistribution:
    """P(n) for n = 0..n_max plus the unaccounted tail mass."""

    probabilities: np.ndarray
    tail_mass: float


def photon_number_distribution(repr_: FockRepr, n_max: int = 64) -> NumberDistribution:
    """P(n) = |c_n|^2; Poissonian with mean |alpha|^2 for coherent states."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    probs = np.abs(repr_.coefficients(n_max)) ** 2
    return NumberDistribution(probs, tail_mass=float(max(0.0, 1.0 - probs.sum())))


def _packet_norm_sq(packet: Packet) -> float:
    if isinstance(packet, SeparablePacket):
        return packet.spectral.norm_sq * packet.spatial.norm_sq
    return packet.norm_sq


@dataclass(frozen=True)
class QuantumLightState:
    """Photon statistics plus the wavepacket every photon occupies."""

    repr: FockRepr
    packet: Packet

    def __post_init__(self):
        total = _packet_norm_sq(self.packet)
        if abs(total - 1.0) > _UNITARY_TOL:
            raise NormalizationError(
                f"state wavepacket must be normalized; norm^2 = {total!r}"
            )


def apply_unitary(state: QuantumLightState, u: Callable[[Packet], Packet]) -> QuantumLightState:
    """Transform the wavepacket only; the Fock representation rides through.

    ``u`` must be one of the engine's norm-preserving maps: a norm defect
    beyond 1e-6 rejects the call (guards against accidentally lossy masks).
    """
    before = _packet_norm_sq(state.packet)
    packet = u(state.packet)
    after = _packet_norm_sq(packet)
    if abs(after - before) > _UNITARY_TOL * max(before, 1.0):
        raise NonUnitaryMapError(
            f"map changed the wavepacket norm^2 from {before!r} to {after!r}"
        )
    return QuantumLightState(repr=state.repr, packet=packet)


def lens_apply_state(state: QuantumLightState, lens) -> QuantumLightState:
    """Lens on a spatially-2D state: statistics untouched, wavefront transformed."""
    from .systems import lens_apply

    if not isinstance(state.packet, SpatialField2D):
        raise TypeError("lens_apply_state needs a spatially 2D wavepacket")
    return apply_unitary(state, lambda p: lens_apply(p, lens))


def four_f_apply_state(state: QuantumLightState, pupil, f_len: float, k0: float) -> QuantumLightState:
    """4f stage on a spatially-2D state."""
    from .systems import four_f_apply

    if not isinstance(state.packet, SpatialField2D):
        raise TypeError("four_f_apply_state needs a spatially 2D wavepacket")
    return apply_unitary(state, lambda p: four_f_apply(p, pupil, f_len, k0))


def pulse_shaper_apply_state(state: QuantumLightState, spec) -> QuantumLightState:
    """Pulse shaper on a spectrally-1D state."""
    from .systems import pulse_shaper_apply

    if not isinstance(state.packet, SpectralField1D):
        raise TypeError("pulse_shaper_apply_state needs a spectral 1D wavepacket")
    return apply_unitary(state, lambda p: pulse_shaper_apply(p, spec))


def joint_detection_density(state: QuantumLightState) -> tuple[np.ndarray, float]:
    """Mean detected photon density nbar * |xi(x, y)|^2 and nbar itself.

    The nbar weighting is an artifact convention: it is the unique scaling
    that makes the density integrate to the mean photon number for every
    representation.
    """
    packet = state.packet
    spatial = packet.spatial if isinstance(packet, SeparablePacket) else packet
    if not isinstance(spatial, SpatialField2D):
        raise TypeError("joint_detection_density needs a spatially 2D wavepacket")
    nbar = state.repr.mean_photon_number()
    return nbar * np.abs(spatial.values) ** 2, nbar
