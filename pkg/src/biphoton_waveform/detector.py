"""Detector response: Gaussian timing jitter, peak normalization, accidental floor."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NormalizationError, ResolutionError

FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class JitterModel:
    fwhm: float = 0.35e-9
    kernel_support_sigmas: float = 6.0

    def __post_init__(self):
        if not (np.isfinite(self.fwhm) and self.fwhm > 0):
            raise InvalidParameterError(f"jitter fwhm must be positive, got {self.fwhm!r}")
        if not self.kernel_support_sigmas > 0:
            raise InvalidParameterError("kernel_support_sigmas must be positive")

    def kernel(self, t_step):
        return gaussian_kernel(self.fwhm, t_step, self.kernel_support_sigmas)


def gaussian_kernel(fwhm, t_step, support_sigmas=6.0):
    """Discrete, symmetric Gaussian of the given FWHM, normalized to unit sum.

    The kernel has odd length ``2K + 1`` with ``K = floor(support_sigmas sigma / t_step)``.

    :raises ResolutionError: if ``t_step > fwhm / 3``.
    """
    if not (fwhm > 0 and t_step > 0):
        raise InvalidParameterError("fwhm and t_step must be positive")
    if t_step > fwhm / 3.0:
        raise ResolutionError(
            f"time step {t_step:.3g} s undersamples a {fwhm:.3g} s FWHM kernel (need <= fwhm/3)"
        )
    sigma = fwhm * FWHM_TO_SIGMA
    half = int(math.floor(support_sigmas * sigma / t_step))
    k = np.arange(-half, half + 1)
    w = np.exp(-0.5 * (k * t_step / sigma) ** 2)
    return w / w.sum()


def convolve(trace, kernel):
    """Convolve a trace with an odd-length kernel centred on its middle sample.

    Samples outside the grid count as zero; the output lives on the input grid.
    """
    kernel = np.asarray(kernel, dtype=float)
    if kernel.ndim != 1 or kernel.size % 2 != 1:
        raise InvalidParameterError("kernel must be a 1-D array of odd length")
    n = trace.grid.n_points
    full = np.convolve(trace.values, kernel)
    h = (kernel.size - 1) // 2
    out = np.maximum(full[h:h + n], 0.0)
    return trace.with_values(out, "g2")


def normalize_peak(trace):
    """Scale a trace so its maximum is exactly one."""
    peak = float(np.max(trace.values))
    if not peak > 0:
        raise NormalizationError("cannot normalize a trace whose maximum is not positive")
    return trace.with_values(trace.values / peak)


def add_background(trace, floor):
    """Add a constant accidental-coincidence floor to every sample."""
    if not (np.isfinite(floor) and floor >= 0):
        raise InvalidParameterError(f"background floor must be non-negative, got {floor!r}")
    return trace.with_values(trace.values + floor)


def apply_detector(raw, jitter, normalize=True, floor=0.0, floor_before_normalize=False):
    """Full detector chain. Returns ``(convolved, final)`` traces."""
    convolved = convolve(raw, jitter.kernel(raw.grid.t_step))
    final = convolved
    if floor and floor_before_normalize:
        final = add_background(final, floor)
    if normalize:
        final = normalize_peak(final)
    if floor and not floor_before_normalize:
        final = add_background(final, floor)
    return convolved, final
