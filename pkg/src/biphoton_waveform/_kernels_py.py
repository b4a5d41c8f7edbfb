"""Numpy implementation of the quadrature hot loop.

``gl_panel_sums`` applies one Gauss-Legendre rule to every panel ``[lo[p], hi[p]]``
of the integrand ``C f(v) / D(v) * exp(i k_p v tau)`` and returns the per-panel
sums of the integrand and of its modulus. The ``exp(-gamma_21 tau / 2) H(tau)``
envelope is left to the caller.
"""
import math

import numpy as np

IMPLEMENTATION = "python"


def gl_panel_sums(lo, hi, nodes, weights, tau, k_p, k_c, delta_p, gamma_21, gamma_3,
                  omega_c_sq, c_re, c_im, u):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    v = mid[:, None] + half[:, None] * nodes[None, :]
    f = np.exp(-((v / u) ** 2)) / (math.sqrt(math.pi) * u)
    den = 4.0 * (0.5 * gamma_21 + 1j * (delta_p - k_p * v)) * (
        0.5 * gamma_3 + 1j * ((-k_p + k_c) * v)
    ) + omega_c_sq
    g = complex(c_re, c_im) / den * f * np.exp(1j * (k_p * v * tau))
    sums = half * (g @ weights)
    abs_sums = half * (np.abs(g) @ weights)
    return sums, abs_sums
