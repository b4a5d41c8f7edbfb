"""Waveform metrology, the coupling-wavelength sweep, and channel comparisons.

Widths are full widths at half maximum taken from the outermost half-maximum
crossings, each located by linear interpolation between the bracketing samples.
They are meant to be measured on jitter-convolved traces.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._csvio import fmt, write_json
from .correlator import QuadratureSpec, TauGrid, g2_trace
from .detector import JitterModel, apply_detector
from .errors import BiphotonError, InvalidParameterError, WidthUnboundedError

_NS = 1e-9


@dataclass(frozen=True)
class WidthReport:
    fwhm: float
    peak_tau: float
    peak_value: float
    left_crossing: float
    right_crossing: float
    positive_area_fraction: float = float("nan")

    def to_dict(self):
        return {
            "fwhm_ns": self.fwhm / _NS,
            "peak_tau_ns": self.peak_tau / _NS,
            "peak_value": self.peak_value,
            "left_crossing_ns": self.left_crossing / _NS,
            "right_crossing_ns": self.right_crossing / _NS,
            "positive_area_fraction": self.positive_area_fraction,
        }


def fwhm(trace):
    """Measure the full width at half maximum of a trace.

    :raises WidthUnboundedError: if the trace is still at or above half maximum
        at either end of its grid.
    """
    y = trace.values
    tau = trace.tau
    j_peak = int(np.argmax(y))
    peak = float(y[j_peak])
    if not peak > 0:
        raise InvalidParameterError("trace has no positive maximum")
    half = 0.5 * peak
    above = np.flatnonzero(y >= half)
    i0, i1 = int(above[0]), int(above[-1])
    if i0 == 0 or i1 == len(y) - 1:
        raise WidthUnboundedError("trace does not fall below half maximum inside the grid")
    left = tau[i0 - 1] + (half - y[i0 - 1]) / (y[i0] - y[i0 - 1]) * (tau[i0] - tau[i0 - 1])
    right = tau[i1] + (half - y[i1]) / (y[i1 + 1] - y[i1]) * (tau[i1 + 1] - tau[i1])
    total = float(y.sum())
    return WidthReport(
        fwhm=float(right - left),
        peak_tau=float(tau[j_peak]),
        peak_value=peak,
        left_crossing=float(left),
        right_crossing=float(right),
        positive_area_fraction=float(y[tau > 0].sum() / total),
    )


@dataclass(frozen=True)
class SimulationResult:
    raw: object
    convolved: object
    final: object
    report: WidthReport


def simulate(params, ensemble, grid=TauGrid(), quad=QuadratureSpec(), jitter=JitterModel(),
             normalize=True, floor=0.0, floor_before_normalize=False, n_jobs=1,
             diagnostics=None):
    """Raw g2 trace, its jitter-convolved version, the final output curve and its width.

    The width report is always taken from the convolved, peak-normalized curve
    without any background floor.
    """
    raw = g2_trace(grid, params, ensemble, quad, n_jobs=n_jobs, diagnostics=diagnostics)
    convolved, final = apply_detector(raw, jitter, normalize, floor, floor_before_normalize)
    return SimulationResult(raw, convolved, final, fwhm(convolved))


@dataclass
class SweepSurface:
    """Peak-normalized g2 versus delay, one row per coupling wavelength.

    Rows that failed carry NaN and an entry in ``errors``; ``degenerate`` marks
    rows whose coupling wavelength equals the pump wavelength.
    """

    lambda_c_values: np.ndarray
    grid: TauGrid
    values: np.ndarray
    fwhm: list = field(default_factory=list)
    degenerate: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)

    def row_index(self, lambda_c, tol=None):
        """Index of the row closest to ``lambda_c``; ``tol`` bounds the allowed mismatch."""
        j = int(np.argmin(np.abs(self.lambda_c_values - lambda_c)))
        if tol is not None and abs(self.lambda_c_values[j] - lambda_c) > tol:
            raise KeyError(f"no sweep row within {tol} m of {lambda_c} m")
        return j

    def to_csv(self, path):
        """Long-form CSV: one line per (row, delay)."""
        tau_ns = self.grid.values / _NS
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            fh.write("lambda_c_nm,tau_ns,g2\n")
            for lam, row in zip(self.lambda_c_values, self.values):
                lam_s = fmt(lam / _NS)
                for t, g in zip(tau_ns, row):
                    fh.write(f"{lam_s},{fmt(t)},{fmt(g)}\n")

    def summary(self):
        rows = []
        for j, lam in enumerate(self.lambda_c_values):
            w = self.fwhm[j]
            rows.append({
                "lambda_c_nm": float(lam / _NS),
                "fwhm_ns": None if w is None else w / _NS,
                "degenerate": bool(self.degenerate[j]),
                "error": self.errors.get(j),
            })
        return {"n_rows": len(rows), "rows": rows}

    def write_summary(self, path):
        write_json(path, self.summary())


def sweep_lambda_c(lambda_min, lambda_max, n_steps, base_params, ensemble, grid=TauGrid(),
                   quad=QuadratureSpec(), jitter=JitterModel(), include=(), n_jobs=1):
    """Run the full pipeline for evenly spaced coupling wavelengths.

    Each row is ``g2_trace -> convolve -> normalize_peak`` with ``k_c`` recomputed
    from the row's wavelength and every other coefficient taken from
    ``base_params``. Extra wavelengths in ``include`` are merged into the grid.
    Failures are recorded per row and never abort the sweep.
    """
    if not lambda_min < lambda_max:
        raise InvalidParameterError("lambda_min must be smaller than lambda_max")
    if n_steps < 2:
        raise InvalidParameterError("a sweep needs at least two rows")
    lams = np.linspace(lambda_min, lambda_max, int(n_steps))
    for extra in include:
        close = np.isclose(lams, extra, rtol=1e-9, atol=0.0)
        lams = np.sort(np.append(lams[~close], float(extra)))
    lambda_p = base_params.drive.lambda_p

    def row(lam):
        params = base_params.with_lambda_c(float(lam))
        try:
            result = simulate(params, ensemble, grid, quad, jitter)
        except BiphotonError as exc:
            return None, None, f"{type(exc).__name__}: {exc}"
        return result.final.values, result.report.fwhm, None

    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(row, lams))
    else:
        rows = [row(lam) for lam in lams]

    values = np.full((len(lams), grid.n_points), np.nan)
    widths, errors = [], {}
    for j, (vals, w, err) in enumerate(rows):
        if vals is not None:
            values[j] = vals
        widths.append(w)
        if err:
            errors[j] = err
    degenerate = [bool(math.isclose(lam, lambda_p, rel_tol=1e-12)) for lam in lams]
    return SweepSurface(lams, grid, values, widths, degenerate, errors)


@dataclass(frozen=True)
class TransitionComparison:
    width_ratio: float
    peak_tau_a: float
    peak_tau_b: float
    positive_fraction_a: float
    positive_fraction_b: float
    positive_dominated: str

    def to_dict(self):
        return {
            "width_ratio": self.width_ratio,
            "peak_tau_a_ns": self.peak_tau_a / _NS,
            "peak_tau_b_ns": self.peak_tau_b / _NS,
            "positive_fraction_a": self.positive_fraction_a,
            "positive_fraction_b": self.positive_fraction_b,
            "positive_dominated": self.positive_dominated,
        }


def compare_transitions(report_a, report_b):
    """Compare two width reports; ``width_ratio`` is ``b / a``.

    ``positive_dominated`` names whichever trace keeps more of its area at
    ``tau > 0`` ("a", "b", or "tie").
    """
    fa, fb = report_a.positive_area_fraction, report_b.positive_area_fraction
    if fa > fb:
        dominated = "a"
    elif fb > fa:
        dominated = "b"
    else:
        dominated = "tie"
    return TransitionComparison(
        width_ratio=report_b.fwhm / report_a.fwhm,
        peak_tau_a=report_a.peak_tau,
        peak_tau_b=report_b.peak_tau,
        positive_fraction_a=fa,
        positive_fraction_b=fb,
        positive_dominated=dominated,
    )
