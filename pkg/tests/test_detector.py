import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from biphoton_waveform.analysis import fwhm
from biphoton_waveform.correlator import RealTrace, TauGrid
from biphoton_waveform.detector import (
    JitterModel,
    add_background,
    apply_detector,
    convolve,
    gaussian_kernel,
    normalize_peak,
)
from biphoton_waveform.errors import (
    InvalidParameterError,
    NormalizationError,
    ResolutionError,
)

from oracles import discrete_gaussian

GRID = TauGrid()
DT = GRID.t_step
KERNEL = gaussian_kernel(0.35e-9, DT)

nonneg = arrays(np.float64, 200, elements=st.one_of(st.just(0.0), st.floats(1e-250, 1e3)))


def trace(values, grid=None):
    grid = grid or TauGrid(0.0, DT, len(values))
    return RealTrace(grid, np.asarray(values, dtype=float))


def test_kernel_sum_and_symmetry():
    assert abs(KERNEL.sum() - 1.0) < 1e-12
    assert np.array_equal(KERNEL, KERNEL[::-1])
    assert len(KERNEL) % 2 == 1


def test_kernel_center_weight():
    sigma = 0.35e-9 / (2 * math.sqrt(2 * math.log(2)))
    assert sigma == pytest.approx(1.4863131505040332e-10, rel=1e-12)
    center = KERNEL[len(KERNEL) // 2]
    # dt / (sigma sqrt(2 pi)) evaluated by hand
    assert center == pytest.approx(0.026841065105704328, rel=1e-6)


def test_kernel_support():
    sigma = 0.35e-9 / (2 * math.sqrt(2 * math.log(2)))
    half = (len(KERNEL) - 1) // 2
    assert half == math.floor(6 * sigma / DT)


def test_undersampled_kernel():
    with pytest.raises(ResolutionError):
        gaussian_kernel(0.35e-9, 0.35e-9 / 2.9)


def test_jitter_model_validation():
    assert JitterModel().fwhm == 0.35e-9
    with pytest.raises(InvalidParameterError):
        JitterModel(fwhm=0.0)


def test_impulse_response():
    x = np.zeros(301)
    x[150] = 1.0
    out = convolve(trace(x), KERNEL).values
    h = len(KERNEL) // 2
    np.testing.assert_array_equal(out[150 - h:150 + h + 1], KERNEL)
    assert np.all(out[:150 - h] == 0) and np.all(out[150 + h + 1:] == 0)


def test_gaussian_quadrature_law():
    tau = GRID.values
    raw = trace(discrete_gaussian(tau, 3e-9, 1.0e-9), GRID)
    out = convolve(raw, KERNEL)
    expected = math.hypot(1.0, 0.35) * 1e-9
    assert fwhm(out).fwhm == pytest.approx(expected, rel=0.01)


def test_area_preserved_away_from_edges():
    raw = trace(discrete_gaussian(GRID.values, 5e-9, 1e-9), GRID)
    out = convolve(raw, KERNEL)
    assert out.values.sum() * DT == pytest.approx(raw.values.sum() * DT, rel=1e-9)


@settings(max_examples=50)
@given(nonneg, nonneg, st.floats(0, 10), st.floats(0, 10))
def test_convolution_linear(x, y, a, b):
    lhs = convolve(trace(a * x + b * y), KERNEL).values
    rhs = a * convolve(trace(x), KERNEL).values + b * convolve(trace(y), KERNEL).values
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(rhs).max()))


@settings(max_examples=50)
@given(nonneg)
def test_convolution_never_raises_maximum(x):
    assert convolve(trace(x), KERNEL).values.max() <= x.max() * (1 + 1e-12)


def test_normalize_peak():
    const = normalize_peak(trace(np.full(10, 3.7)))
    assert np.all(const.values == 1.0)
    with pytest.raises(NormalizationError):
        normalize_peak(trace(np.zeros(10)))


@given(nonneg.filter(lambda x: x.max() > 0), st.floats(1e-3, 1e3))
def test_normalize_idempotent_and_scale_free(x, c):
    once = normalize_peak(trace(x))
    assert once.values.max() == 1.0
    np.testing.assert_array_equal(normalize_peak(once).values, once.values)
    np.testing.assert_allclose(normalize_peak(trace(c * x)).values, once.values, rtol=1e-14)


def test_add_background():
    x = trace(np.linspace(0, 1, 5))
    np.testing.assert_array_equal(add_background(x, 0.0).values, x.values)
    assert np.all(add_background(trace(np.zeros(5)), 1.0).values == 1.0)
    with pytest.raises(InvalidParameterError):
        add_background(x, -0.1)


def test_detector_chain_floor_order():
    x = trace(discrete_gaussian(GRID.values, 2e-9, 1e-9), GRID)
    _, after = apply_detector(x, JitterModel(), floor=0.5)
    _, before = apply_detector(x, JitterModel(), floor=0.5, floor_before_normalize=True)
    assert after.values.max() == pytest.approx(1.5)
    assert before.values.max() == 1.0


def test_accidental_floor_scale(run_6d):
    floor = 1.0 / 667
    out = add_background(run_6d.final, floor)
    assert out.values.max() / out.values.min() == pytest.approx(668, rel=1e-3)


def test_jitter_tail_before_zero_delay(run_6d):
    conv = run_6d.convolved
    j = int(np.argmin(np.abs(conv.tau + 3 * 0.35e-9)))
    assert conv.values[j] / conv.values.max() < 1e-4
