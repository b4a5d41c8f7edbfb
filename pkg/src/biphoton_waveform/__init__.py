"""Biphoton temporal waveforms from Doppler-broadened cascade-type atomic ensembles.

The pipeline is ``g2_trace`` (coherent velocity average of the per-velocity
two-photon amplitude) -> ``apply_detector`` (Gaussian timing jitter, peak
normalization) -> ``fwhm``. ``simulate`` runs it end to end.
"""
from .analysis import (
    SweepSurface,
    WidthReport,
    compare_transitions,
    fwhm,
    simulate,
    sweep_lambda_c,
)
from .biphoton import VelocityDecomposition, WavefunctionParams, decompose, psi_v
from .correlator import (
    QuadratureSpec,
    RealTrace,
    TauGrid,
    g2_trace,
    velocity_integral,
)
from .detector import JitterModel, add_background, convolve, gaussian_kernel, normalize_peak
from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .model import (
    PRESETS,
    CascadeSystem,
    DriveConfig,
    ThermalEnsemble,
    doppler_fwhm,
    get_preset,
    maxwell_boltzmann,
    most_probable_speed,
    two_photon_shift,
    velocity_acceptance,
)


def preset_params(name, **drive_kwargs):
    """:class:`WavefunctionParams` for a named preset; keyword arguments go to the drive."""
    preset = get_preset(name)
    return WavefunctionParams(preset.system, preset.drive(**drive_kwargs))


__version__ = "0.1.0"
