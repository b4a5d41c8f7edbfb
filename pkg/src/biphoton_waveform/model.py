"""Physical data model: cascade levels, drive lasers, thermal ensemble and Doppler kinematics.

All quantities are SI. Rates, detunings and Rabi frequencies are angular (rad/s);
the manifest layer converts from MHz (ordinary frequency) at the boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.constants as sc

from .errors import DegenerateWavelengthError, InvalidParameterError

TWO_PI = 2.0 * math.pi
K_B = sc.k  # exact SI value
CS133_MASS = 2.2069e-25  # kg
DEFAULT_TEMPERATURE = 358.15  # K, 85 degC
DEFAULT_OMEGA_C = TWO_PI * 5.0e6  # rad/s
DEFAULT_COEFFICIENT = 1j


def _finite(name, value):
    if not np.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")


def most_probable_speed(temperature, mass):
    """Most probable speed ``sqrt(2 k_B T / m)`` of a thermal gas, in m/s."""
    _finite("temperature", temperature)
    _finite("mass", mass)
    if mass <= 0:
        raise InvalidParameterError(f"mass must be positive, got {mass!r}")
    if temperature < 0:
        raise InvalidParameterError(f"temperature must be non-negative, got {temperature!r}")
    return math.sqrt(2.0 * K_B * temperature / mass)


def maxwell_boltzmann(v, u):
    """One-dimensional Maxwell-Boltzmann density ``exp(-(v/u)^2) / (sqrt(pi) u)`` in s/m.

    :param v: velocity or array of velocities (m/s).
    :param u: most probable speed (m/s), strictly positive.
    """
    if not u > 0 or not np.isfinite(u):
        raise InvalidParameterError(f"most probable speed must be positive and finite, got {u!r}")
    v = np.asarray(v, dtype=float)
    out = np.exp(-((v / u) ** 2)) / (math.sqrt(math.pi) * u)
    return out if out.ndim else float(out)


def two_photon_shift(k_p, k_c, v):
    """Residual two-photon Doppler shift ``(-k_p + k_c) v`` in rad/s.

    Positive ``v`` points along the pump beam; the coupling beam counter-propagates.
    """
    v = np.asarray(v, dtype=float)
    out = (-k_p + k_c) * v
    return out if out.ndim else float(out)


def velocity_acceptance(gamma_3, k_p, k_c):
    """Width ``|gamma_3 / (k_p - k_c)|`` of the velocity class on two-photon resonance, m/s."""
    if not gamma_3 > 0:
        raise InvalidParameterError(f"gamma_3 must be positive, got {gamma_3!r}")
    dk = k_p - k_c
    if dk == 0:
        raise DegenerateWavelengthError("k_p == k_c: velocity acceptance is unbounded")
    return abs(gamma_3 / dk)


def doppler_fwhm(wavelength, u):
    """FWHM of the 1-D Doppler profile, ``2 sqrt(ln 2) u / lambda``, in Hz."""
    if not wavelength > 0:
        raise InvalidParameterError(f"wavelength must be positive, got {wavelength!r}")
    if u < 0 or not np.isfinite(u):
        raise InvalidParameterError(f"speed must be non-negative, got {u!r}")
    return 2.0 * math.sqrt(math.log(2.0)) * u / wavelength


@dataclass(frozen=True)
class CascadeSystem:
    """Decay rates (rad/s) of a ground - intermediate - excited ladder."""

    gamma_21: float
    gamma_32: float
    gamma_32_prime: float
    label: str = ""

    def __post_init__(self):
        for name in ("gamma_21", "gamma_32", "gamma_32_prime"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")

    @property
    def gamma_3(self):
        """Total decay rate of the excited state."""
        return self.gamma_32 + self.gamma_32_prime

    @classmethod
    def from_linewidths(cls, gamma_21, gamma_3, label=""):
        """Build from the total excited-state rate, split evenly between both channels."""
        return cls(gamma_21, gamma_3 / 2.0, gamma_3 / 2.0, label)


@dataclass(frozen=True)
class DriveConfig:
    """Pump and coupling lasers.

    ``coefficient_c`` is the overall complex prefactor of the two-photon amplitude.
    """

    lambda_p: float
    lambda_c: float
    delta_p: float = 0.0
    omega_c: float = DEFAULT_OMEGA_C
    coefficient_c: complex = DEFAULT_COEFFICIENT

    def __post_init__(self):
        for name in ("lambda_p", "lambda_c"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
        _finite("delta_p", self.delta_p)
        if not (np.isfinite(self.omega_c) and self.omega_c >= 0):
            raise InvalidParameterError(f"omega_c must be non-negative, got {self.omega_c!r}")
        c = complex(self.coefficient_c)
        if not (np.isfinite(c.real) and np.isfinite(c.imag)):
            raise InvalidParameterError("coefficient_c must be finite")
        object.__setattr__(self, "coefficient_c", c)

    @property
    def k_p(self):
        return TWO_PI / self.lambda_p

    @property
    def k_c(self):
        return TWO_PI / self.lambda_c


@dataclass(frozen=True)
class ThermalEnsemble:
    """Vapor temperature (K) and atomic mass (kg); ``u`` is the most probable speed."""

    temperature: float = DEFAULT_TEMPERATURE
    atomic_mass: float = CS133_MASS
    u: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "u", most_probable_speed(self.temperature, self.atomic_mass))

    @classmethod
    def from_speed(cls, u, atomic_mass=CS133_MASS):
        """Ensemble whose most probable speed is ``u``; handy for the cold-atom limit."""
        if u < 0:
            raise InvalidParameterError(f"speed must be non-negative, got {u!r}")
        return cls(u * u * atomic_mass / (2.0 * K_B), atomic_mass)


@dataclass(frozen=True)
class Preset:
    system: CascadeSystem
    lambda_p: float
    lambda_c: float

    def drive(self, **kwargs):
        return DriveConfig(self.lambda_p, self.lambda_c, **kwargs)


# experiment units, as written in manifests
PRESET_TABLE = {
    "Cs-6D5/2": {"gamma_21_mhz": 5.2, "gamma_3_mhz": 2.6, "lambda_p_nm": 852.0, "lambda_c_nm": 917.0},
    "Cs-8S1/2": {"gamma_21_mhz": 5.2, "gamma_3_mhz": 1.7, "lambda_p_nm": 852.0, "lambda_c_nm": 795.0},
}

PRESETS = {
    name: Preset(
        CascadeSystem.from_linewidths(TWO_PI * row["gamma_21_mhz"] * 1e6,
                                      TWO_PI * row["gamma_3_mhz"] * 1e6, name),
        row["lambda_p_nm"] / 1e9,
        row["lambda_c_nm"] / 1e9,
    )
    for name, row in PRESET_TABLE.items()
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown preset {name!r}; known presets: {', '.join(PRESETS)}"
        ) from None
