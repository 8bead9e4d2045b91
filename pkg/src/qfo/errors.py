"""Exception types raised by the engine.

Guard violations carry enough context (the offending value and the safe
range) for a caller to fix the scenario without reading source.
"""


class QfoError(Exception):
    """Base class for all engine errors."""


class GridError(QfoError):
    """Invalid grid construction (odd sample count, non-positive pitch, ...)."""


class GridMismatchError(QfoError):
    """Two fields that must share a grid do not."""


class NormalizationError(QfoError):
    """A field that must be normalized (or normalizable) is not."""


class ResolutionError(QfoError):
    """A feature is under-resolved by the grid (sampling guard)."""


class AliasingGuardError(QfoError):
    """Propagation distance exceeds the transfer-function aliasing limit."""

    def __init__(self, z: float, z_max: float):
        self.z = z
        self.z_max = z_max
        super().__init__(
            f"propagation distance |z|={abs(z):g} exceeds the aliasing-safe "
            f"limit z_max={z_max:g} for this grid and wavenumber"
        )


class FarFieldError(QfoError):
    """Far-field (Fraunhofer) propagation requested inside the near field."""

    def __init__(self, z: float, z_min: float):
        self.z = z
        self.z_min = z_min
        super().__init__(
            f"z={z:g} is inside the near field; the far-field form needs "
            f"z >= {z_min:g} (20x the far-field threshold)"
        )


class NyquistError(QfoError):
    """A diffraction order or spectral shift would leave the sampled band."""


class NonUnitaryMapError(QfoError):
    """A map handed to the quantum layer does not preserve the wavepacket norm."""


class ShaperValidationError(QfoError):
    """Pulse-shaper deterministic-separation conditions are not met."""


class ScenarioError(QfoError):
    """Scenario file failed to parse or validate."""
