"""qfo: a numerical engine for quantum Fourier optics.

Propagates discretized photon-wavepackets through unitary phase-shifting
elements (free space, lenses, gratings, pupils) and composed systems (lens
operator, 4f processor, 8f pulse shaper), while a Fock-space layer carries
photon statistics invariantly through every unitary.
"""

from .grids import Grid1D, Grid2D
from .fields import (
    AngularField2D,
    SeparablePacket,
    SpatialField2D,
    SpectralField1D,
    TemporalField1D,
)
from .fourier import (
    convolve2,
    forward_ft2,
    inverse_ft2,
    parity,
    rescale_field,
    spectral_to_temporal,
    temporal_to_spectral,
)
from .wavepackets import (
    make_gaussian_2d,
    make_gaussian_spectrum,
    make_rect_spectrum,
    moment_width,
    probability_density,
    superpose,
)
from .elements import (
    FresnelKernel,
    GratingSpec,
    PhaseMask,
    apply_phase_mask,
    exact_propagate,
    far_field_threshold,
    fraunhofer_propagate,
    fresnel_impulse_response,
    fresnel_propagate,
    fresnel_z_limit,
    grating_coefficients,
    grating_diffract,
    lens_phase,
)
from .systems import (
    LatticeResponse,
    LensOperator,
    PeriodicPupil,
    PulseShaperSpec,
    chip_phase_function,
    confocal_grid,
    four_f_apply,
    four_f_apply_via_convolution,
    four_f_periodic_apply,
    inverse_pupil,
    lens_apply,
    lens_apply_numeric,
    omega_map,
    periodic_pupil_analyze,
    pulse_shaper_apply,
    pulse_shaper_simulate,
    validate_shaper,
)
from .quantum import (
    FockRepr,
    QuantumLightState,
    apply_unitary,
    joint_detection_density,
    photon_number_distribution,
)

__version__ = "0.1.0"
