import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biphoton_waveform import preset_params
from biphoton_waveform.analysis import (
    WidthReport,
    compare_transitions,
    fwhm,
    simulate,
    sweep_lambda_c,
)
from biphoton_waveform.correlator import QuadratureSpec, RealTrace, TauGrid
from biphoton_waveform.errors import WidthUnboundedError

from oracles import discrete_gaussian

GRID = TauGrid()
SWEEP_GRID = TauGrid.from_ns(-2.0, 0.02, 501)


def test_fwhm_of_gaussian():
    t = GRID.values
    rep = fwhm(RealTrace(GRID, discrete_gaussian(t, 1e-9, 0.35e-9)))
    assert rep.fwhm == pytest.approx(0.35e-9, rel=0.005)
    assert rep.left_crossing <= rep.peak_tau <= rep.right_crossing
    assert rep.fwhm == pytest.approx(rep.right_crossing - rep.left_crossing, rel=1e-15)


def test_fwhm_of_one_sided_exponential(params_6d):
    gamma = params_6d.system.gamma_21
    grid = TauGrid.from_ns(-5, 0.01, 5001)
    t = grid.values
    y = np.where(t >= 0, np.exp(-gamma * np.maximum(t, 0)), 0.0)
    rep = fwhm(RealTrace(grid, y))
    assert abs(rep.fwhm - math.log(2) / gamma) <= grid.t_step
    assert rep.positive_area_fraction < 1.0


def test_fwhm_unbounded():
    grid = TauGrid.from_ns(0, 0.01, 100)
    with pytest.raises(WidthUnboundedError):
        fwhm(RealTrace(grid, np.linspace(1, 0.6, 100)))


@settings(max_examples=40)
@given(st.floats(1e-3, 1e6), st.floats(-3, 3), st.floats(0.3, 2.0))
def test_fwhm_invariances(scale, shift_ns, width_ns):
    base_grid = TauGrid.from_ns(-10, 0.01, 2001)
    moved = TauGrid.from_ns(-10 + shift_ns, 0.01, 2001)
    y = discrete_gaussian(base_grid.values, 0.0, width_ns * 1e-9)
    a = fwhm(RealTrace(base_grid, y)).fwhm
    b = fwhm(RealTrace(moved, scale * y)).fwhm
    assert b == pytest.approx(a, rel=1e-9)


def test_jitter_never_narrows(run_6d, run_8s):
    for run in (run_6d, run_8s):
        raw = fwhm(run.raw)
        assert run.report.fwhm >= raw.fwhm - run.raw.grid.t_step


def test_simulate_outputs(run_6d):
    assert run_6d.final.values.max() == 1.0
    assert np.all(run_6d.raw.values[run_6d.raw.tau < 0] == 0)
    assert isinstance(run_6d.report, WidthReport)


def test_compare_identical_reports(run_6d):
    cmp = compare_transitions(run_6d.report, run_6d.report)
    assert cmp.width_ratio == 1.0
    assert cmp.positive_dominated == "tie"


def test_compare_presets_fields(run_6d, run_8s):
    cmp = compare_transitions(run_6d.report, run_8s.report)
    assert cmp.width_ratio == run_8s.report.fwhm / run_6d.report.fwhm
    assert cmp.positive_fraction_b > 0.95
    d = cmp.to_dict()
    assert set(d) >= {"width_ratio", "peak_tau_a_ns", "peak_tau_b_ns", "positive_dominated"}


@pytest.fixture(scope="module")
def small_sweep(ensemble):
    base = preset_params("Cs-8S1/2")
    return sweep_lambda_c(790e-9, 920e-9, 3, base, ensemble, SWEEP_GRID,
                          include=(917e-9, 795e-9, 852e-9))


def test_sweep_rows_match_standalone_runs(small_sweep, ensemble):
    base = preset_params("Cs-8S1/2")
    for lam in (917e-9, 795e-9):
        j = small_sweep.row_index(lam, tol=1e-15)
        ref = simulate(base.with_lambda_c(lam), ensemble, SWEEP_GRID).final.values
        np.testing.assert_allclose(small_sweep.values[j], ref, rtol=0, atol=1e-10)


def test_sweep_surface_invariants(small_sweep):
    assert small_sweep.values.shape == (len(small_sweep.lambda_c_values), SWEEP_GRID.n_points)
    assert np.all(small_sweep.values.max(axis=1) == 1.0)
    assert np.all((small_sweep.values >= 0) & (small_sweep.values <= 1))
    assert not small_sweep.errors


def test_sweep_degenerate_row_computed_and_flagged(small_sweep):
    j = small_sweep.row_index(852e-9, tol=1e-15)
    assert small_sweep.degenerate[j]
    assert sum(small_sweep.degenerate) == 1
    assert small_sweep.fwhm[j] is not None


def test_sweep_records_row_failures(ensemble):
    quad = QuadratureSpec(base_panels=2, nodes_per_panel=2, max_subdivisions=1)
    grid = TauGrid.from_ns(-0.1, 0.05, 10)
    surface = sweep_lambda_c(800e-9, 900e-9, 2, preset_params("Cs-8S1/2"), ensemble, grid, quad)
    assert set(surface.errors) == {0, 1}
    assert np.all(np.isnan(surface.values))
    assert surface.summary()["rows"][0]["error"].startswith("ConvergenceError")


def test_sweep_outputs(tmp_path, small_sweep):
    small_sweep.to_csv(tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "lambda_c_nm,tau_ns,g2"
    assert len(lines) == 1 + small_sweep.values.size
    summary = small_sweep.summary()
    assert summary["n_rows"] == len(small_sweep.lambda_c_values)
