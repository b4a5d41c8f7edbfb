"""Coherent Doppler averaging of the two-photon amplitude and the raw g2 trace.

The velocity integral runs over ``[-cutoff u, +cutoff u]`` with composite
Gauss-Legendre panels. Each panel is compared against the same rule applied to
its two halves; panels whose disagreement is large relative to the modulus
integral are split until the summed disagreement drops below the tolerance.
The initial mesh is seeded with geometrically graded breakpoints around the two
resonant velocities so the narrow Lorentzian features are resolved from the
first pass.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from ._csvio import write_csv, write_json
from .errors import ConvergenceError, InvalidParameterError

_NS = 1e-9


@dataclass(frozen=True)
class TauGrid:
    """Uniform delay axis ``t_start + j t_step``, ``j = 0 .. n_points-1`` (seconds)."""

    t_start: float = -5e-9
    t_step: float = 0.01e-9
    n_points: int = 2001

    def __post_init__(self):
        if not (np.isfinite(self.t_step) and self.t_step > 0):
            raise InvalidParameterError(f"t_step must be positive, got {self.t_step!r}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidParameterError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not np.isfinite(self.t_start):
            raise InvalidParameterError("t_start must be finite")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def values(self):
        return self.t_start + self.t_step * np.arange(self.n_points)

    @classmethod
    def from_ns(cls, start_ns, step_ns, n_points):
        return cls(start_ns / 1e9, step_ns / 1e9, n_points)


@dataclass(frozen=True)
class QuadratureSpec:
    cutoff_sigmas: float = 6.0
    base_panels: int = 32
    refinement_tolerance: float = 1e-10
    max_subdivisions: int = 20000
    nodes_per_panel: int = 16

    def __post_init__(self):
        if not self.cutoff_sigmas >= 4:
            raise InvalidParameterError(f"cutoff_sigmas must be >= 4, got {self.cutoff_sigmas!r}")
        if not 0 < self.refinement_tolerance <= 1e-3:
            raise InvalidParameterError(
                f"refinement_tolerance must lie in (0, 1e-3], got {self.refinement_tolerance!r}"
            )
        if self.base_panels < 1:
            raise InvalidParameterError("base_panels must be >= 1")
        if self.max_subdivisions < 0:
            raise InvalidParameterError("max_subdivisions must be >= 0")
        if self.nodes_per_panel < 2:
            raise InvalidParameterError("nodes_per_panel must be >= 2")


@dataclass(frozen=True)
class ComplexTrace:
    grid: TauGrid
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.grid.n_points:
            raise InvalidParameterError("trace length does not match its grid")


@dataclass(frozen=True)
class RealTrace:
    """Non-negative real function sampled on a :class:`TauGrid`."""

    grid: TauGrid
    values: np.ndarray
    column: str = field(default="g2", compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise InvalidParameterError("trace length does not match its grid")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidParameterError("trace values must be finite and non-negative")
        object.__setattr__(self, "values", values)

    @property
    def tau(self):
        return self.grid.values

    def with_values(self, values, column=None):
        return RealTrace(self.grid, values, column or self.column)

    def to_csv(self, path):
        write_csv(path, ("tau_ns", self.column), (self.tau / _NS, self.values))


@dataclass(frozen=True)
class QuadratureResult:
    """Converged velocity integral with its diagnostics.

    ``modulus`` is the integral of ``|psi_v f|`` over the same mesh.
    """

    value: complex
    modulus: float
    panels: int
    subdivisions: int
    previous: complex


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return np.ascontiguousarray(x), np.ascontiguousarray(w)


def _graded_breaks(center, half_width, limit, stop):
    """Breakpoints ``center +- half_width * 2**j`` up to ``stop`` away, clipped to ``+-limit``."""
    out = [center]
    step = half_width
    while step < stop:
        out.extend((center - step, center + step))
        step *= 2.0
    return [b for b in out if -limit < b < limit]


def initial_mesh(tau, params, u, quad):
    """Breakpoints of the starting panel set for one delay."""
    s, d = params.system, params.drive
    k_p, k_c = d.k_p, d.k_c
    limit = quad.cutoff_sigmas * u
    breaks = list(np.linspace(-limit, limit, quad.base_panels + 1))
    base_width = 2.0 * limit / quad.base_panels
    half_widths = [0.5 * s.gamma_21 / k_p]
    if k_p != k_c:
        half_widths.append(0.5 * s.gamma_3 / abs(k_p - k_c))
    for center in (d.delta_p / k_p, 0.0):
        for hw in half_widths:
            breaks.extend(_graded_breaks(center, hw, limit, base_width))
    breaks = np.unique(np.asarray(breaks, dtype=float))
    if tau > 0:
        max_width = 0.1 * 2.0 * math.pi / (k_p * tau)
        widths = np.diff(breaks)
        pieces = np.maximum(1, np.ceil(widths / max_width).astype(int))
        if np.any(pieces > 1):
            owner = np.repeat(np.arange(len(widths)), pieces)
            start = np.cumsum(pieces) - pieces
            frac = (np.arange(owner.size) - start[owner]) / pieces[owner]
            breaks = np.append(breaks[:-1][owner] + frac * widths[owner], breaks[-1])
    return breaks


def integrate_velocity(tau, params, ensemble, quad=QuadratureSpec(), kernel=None):
    """Adaptive evaluation of the Doppler-averaged amplitude at one delay.

    :returns: :class:`QuadratureResult` including the causal envelope
        ``exp(-gamma_21 tau / 2)``.
    :raises ConvergenceError: when more than ``quad.max_subdivisions`` panel
        splits would be needed.
    """
    u = ensemble.u
    if not u > 0:
        raise InvalidParameterError("velocity integral needs a positive most probable speed")
    if tau < 0:
        return QuadratureResult(0j, 0.0, 0, 0, 0j)
    kernel = kernel or kernels.gl_panel_sums
    s, d = params.system, params.drive
    nodes, weights = _gauss_legendre(quad.nodes_per_panel)
    consts = (
        float(tau), d.k_p, d.k_c, d.delta_p, s.gamma_21, s.gamma_3,
        d.omega_c**2, d.coefficient_c.real, d.coefficient_c.imag, u,
    )

    def rule(lo, hi):
        return kernel(np.ascontiguousarray(lo), np.ascontiguousarray(hi), nodes, weights, *consts)

    breaks = initial_mesh(tau, params, u, quad)
    lo, hi = breaks[:-1], breaks[1:]
    whole, whole_abs = rule(lo, hi)
    mid = 0.5 * (lo + hi)
    left, left_abs = rule(lo, mid)
    right, right_abs = rule(mid, hi)
    subdivisions = 0
    while True:
        fine = left + right
        err = np.abs(fine - whole)
        current = fine.sum()
        previous = whole.sum()
        tol = quad.refinement_tolerance * (left_abs + right_abs).sum()
        if err.sum() <= tol:
            break
        split = err > tol / len(err)
        n_split = int(split.sum())
        subdivisions += n_split
        if subdivisions > quad.max_subdivisions:
            raise ConvergenceError(
                f"velocity integral at tau={tau:.6g} s did not converge within "
                f"{quad.max_subdivisions} subdivisions",
                previous=previous, current=current, tau=tau,
            )
        keep = ~split
        s_lo, s_mid, s_hi = lo[split], mid[split], hi[split]
        new_lo = np.concatenate((s_lo, s_mid))
        new_hi = np.concatenate((s_mid, s_hi))
        new_whole = np.concatenate((left[split], right[split]))
        new_mid = 0.5 * (new_lo + new_hi)
        nl, nl_abs = rule(new_lo, new_mid)
        nr, nr_abs = rule(new_mid, new_hi)
        lo = np.concatenate((lo[keep], new_lo))
        hi = np.concatenate((hi[keep], new_hi))
        mid = np.concatenate((mid[keep], new_mid))
        whole = np.concatenate((whole[keep], new_whole))
        left = np.concatenate((left[keep], nl))
        right = np.concatenate((right[keep], nr))
        left_abs = np.concatenate((left_abs[keep], nl_abs))
        right_abs = np.concatenate((right_abs[keep], nr_abs))
    envelope = math.exp(-0.5 * s.gamma_21 * tau)
    return QuadratureResult(
        value=complex(current) * envelope,
        modulus=float((left_abs + right_abs).sum()) * envelope,
        panels=len(lo),
        subdivisions=subdivisions,
        previous=complex(previous) * envelope,
    )


def velocity_integral(tau, params, ensemble, quad=QuadratureSpec()):
    """Doppler-averaged two-photon amplitude at delay ``tau`` (seconds)."""
    return integrate_velocity(tau, params, ensemble, quad).value


def _trace_results(grid, params, ensemble, quad, n_jobs):
    taus = grid.values

    def one(j):
        try:
            return integrate_velocity(taus[j], params, ensemble, quad)
        except ConvergenceError as exc:
            exc.tau_index = j
            raise

    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(one, range(grid.n_points)))
    return [one(j) for j in range(grid.n_points)]


def amplitude_trace(grid, params, ensemble, quad=QuadratureSpec(), n_jobs=1):
    """Complex Doppler-averaged amplitude on every delay of ``grid``."""
    results = _trace_results(grid, params, ensemble, quad, n_jobs)
    return ComplexTrace(grid, np.array([r.value for r in results], dtype=complex))


def g2_trace(grid, params, ensemble, quad=QuadratureSpec(), n_jobs=1, diagnostics=None):
    """Raw (pre-detector) cross-correlation ``|integral psi_v f dv|^2`` on ``grid``.

    Delays are independent, so ``n_jobs > 1`` evaluates them on a thread pool;
    the result does not depend on scheduling. If ``diagnostics`` is a list it
    receives one ``{"tau_ns", "panels", "subdivisions"}`` record per delay.
    """
    results = _trace_results(grid, params, ensemble, quad, n_jobs)
    values = np.array([abs(r.value) ** 2 for r in results])
    if diagnostics is not None:
        for tau, r in zip(grid.values, results):
            diagnostics.append(
                {"tau_ns": float(tau / _NS), "panels": r.panels, "subdivisions": r.subdivisions}
            )
    return RealTrace(grid, values, "g2_raw")


def write_diagnostics(path, diagnostics):
    write_json(path, {"kernel": kernels.IMPLEMENTATION, "points": diagnostics})
