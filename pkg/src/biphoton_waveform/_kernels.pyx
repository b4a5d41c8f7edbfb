# cython: language_level=3
"""Compiled Gauss-Legendre panel sums of the Doppler-weighted two-photon amplitude.

Mirrors ``_kernels_py.gl_panel_sums`` exactly; see that module for the contract.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sin, cos, sqrt, hypot, M_PI

cnp.import_array()

IMPLEMENTATION = "cython"


def gl_panel_sums(double[::1] lo, double[::1] hi, double[::1] nodes, double[::1] weights,
                  double tau, double k_p, double k_c, double delta_p, double gamma_21,
                  double gamma_3, double omega_c_sq, double c_re, double c_im, double u):
    cdef Py_ssize_t n_panels = lo.shape[0]
    cdef Py_ssize_t n_nodes = nodes.shape[0]
    sums = np.empty(n_panels, dtype=np.complex128)
    abs_sums = np.empty(n_panels, dtype=np.float64)
    cdef double complex[::1] s_view = sums
    cdef double[::1] a_view = abs_sums
    cdef Py_ssize_t p, j
    cdef double half, mid, v, w, f, a1, b1, a2, b2, dr, di, dd, nr, ni, ph, cr, ci, gr, gi
    cdef double acc_r, acc_i, acc_a
    cdef double norm = 1.0 / (sqrt(M_PI) * u)
    cdef double dk = -k_p + k_c
    with nogil:
        for p in range(n_panels):
            half = 0.5 * (hi[p] - lo[p])
            mid = 0.5 * (hi[p] + lo[p])
            acc_r = 0.0
            acc_i = 0.0
            acc_a = 0.0
            for j in range(n_nodes):
                v = mid + half * nodes[j]
                w = weights[j]
                f = norm * exp(-(v / u) * (v / u))
                a1 = 0.5 * gamma_21
                b1 = delta_p - k_p * v
                a2 = 0.5 * gamma_3
                b2 = dk * v
                dr = 4.0 * (a1 * a2 - b1 * b2) + omega_c_sq
                di = 4.0 * (a1 * b2 + b1 * a2)
                dd = dr * dr + di * di
                # C / D
                nr = (c_re * dr + c_im * di) / dd
                ni = (c_im * dr - c_re * di) / dd
                ph = k_p * v * tau
                cr = cos(ph)
                ci = sin(ph)
                gr = f * (nr * cr - ni * ci)
                gi = f * (nr * ci + ni * cr)
                acc_r += w * gr
                acc_i += w * gi
                acc_a += w * hypot(gr, gi)
            s_view[p] = half * acc_r + 1j * (half * acc_i)
            a_view[p] = half * acc_a
    return sums, abs_sums
