"""Velocity-resolved two-photon wavefunction and its amplitude/phase decomposition."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._csvio import write_csv
from .errors import InvalidParameterError, SingularDenominatorError
from .model import CascadeSystem, DriveConfig, maxwell_boltzmann

_SINGULAR = 1e-300


@dataclass(frozen=True)
class WavefunctionParams:
    """Everything the per-velocity amplitude depends on besides ``tau`` and ``v``."""

    system: CascadeSystem
    drive: DriveConfig

    @property
    def k_p(self):
        return self.drive.k_p

    @property
    def k_c(self):
        return self.drive.k_c

    def with_lambda_c(self, lambda_c):
        """Same parameters with a different coupling wavelength."""
        d = self.drive
        return WavefunctionParams(
            self.system, DriveConfig(d.lambda_p, lambda_c, d.delta_p, d.omega_c, d.coefficient_c)
        )

    def with_coefficient(self, coefficient):
        d = self.drive
        return WavefunctionParams(
            self.system, DriveConfig(d.lambda_p, d.lambda_c, d.delta_p, d.omega_c, coefficient)
        )


def denominator(v, params):
    """Resonant denominator ``4 (G21/2 + i(dp - kp v)) (G3/2 + i(-kp + kc) v) + Oc^2``."""
    s, d = params.system, params.drive
    k_p, k_c = d.k_p, d.k_c
    v = np.asarray(v, dtype=float)
    first = 0.5 * s.gamma_21 + 1j * (d.delta_p - k_p * v)
    second = 0.5 * s.gamma_3 + 1j * ((-k_p + k_c) * v)
    return 4.0 * first * second + d.omega_c**2


def psi_v(tau, v, params):
    """Two-photon amplitude of atoms moving at ``v`` for signal-idler delay ``tau``.

    ``tau`` and ``v`` broadcast against each other. The amplitude is causal: it
    vanishes for ``tau < 0`` and is right-continuous at ``tau = 0``.

    :raises SingularDenominatorError: if ``|denominator| < 1e-300`` anywhere.
    """
    tau = np.asarray(tau, dtype=float)
    v = np.asarray(v, dtype=float)
    den = denominator(v, params)
    if np.any(np.abs(den) < _SINGULAR):
        raise SingularDenominatorError("resonant denominator vanished")
    amp = params.drive.coefficient_c / den
    causal = tau >= 0
    t = np.where(causal, tau, 0.0)
    out = amp * np.exp(1j * params.k_p * v * t) * np.exp(-0.5 * params.system.gamma_21 * t)
    out = np.where(causal, out, 0.0 + 0.0j)
    return out if out.ndim else complex(out)


def principal_phase(z):
    """``arg z`` in ``(-pi, pi]``, with zero assigned wherever ``z == 0``."""
    z = np.asarray(z, dtype=complex)
    phase = np.angle(z)
    phase = np.where(phase <= -math.pi, math.pi, phase)
    return np.where(z == 0, 0.0, phase)


@dataclass(frozen=True)
class VelocityDecomposition:
    tau: float
    velocities: np.ndarray
    weighted_amplitude: np.ndarray
    phase: np.ndarray

    def to_csv(self, path):
        write_csv(
            path,
            ("v_mps", "weighted_amplitude", "phase_rad"),
            (self.velocities, self.weighted_amplitude, self.phase),
        )


def decompose(tau, velocity_grid, params, u):
    """Split ``psi_v(tau)`` over a velocity grid into ``|psi_v| f(v)`` and ``arg psi_v``."""
    v = np.asarray(velocity_grid, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidParameterError("velocity grid must be a non-empty 1-D array")
    if np.any(np.diff(v) <= 0):
        raise InvalidParameterError("velocity grid must be strictly increasing")
    f = maxwell_boltzmann(v, u)
    psi = np.asarray(psi_v(tau, v, params))
    return VelocityDecomposition(
        tau=float(tau),
        velocities=v,
        weighted_amplitude=np.abs(psi) * f,
        phase=principal_phase(psi),
    )
