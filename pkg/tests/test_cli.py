import json
import math
import subprocess
import sys

import pytest
import yaml

from biphoton_waveform._csvio import read_csv
from biphoton_waveform.cli import EXIT_CONVERGENCE, EXIT_OK, EXIT_SCHEMA, main

SHORT = ["--override", "tau_grid.start_ns=-2", "--override", "tau_grid.step_ns=0.02",
         "--override", "tau_grid.n_points=601"]


def test_simulate_writes_all_outputs(tmp_path, capsys):
    out = tmp_path / "sim"
    assert main(["simulate", "--preset", "Cs-6D5/2", "--out", str(out), *SHORT]) == EXIT_OK
    for name in ("raw_trace.csv", "convolved_trace.csv", "normalized_trace.csv",
                 "width_report.json", "manifest.yaml"):
        assert (out / name).exists(), name
    raw = read_csv(out / "raw_trace.csv")
    assert list(raw) == ["tau_ns", "g2_raw"]
    norm = read_csv(out / "normalized_trace.csv")
    assert list(norm) == ["tau_ns", "g2"] and max(norm["g2"]) == 1.0
    report = json.loads((out / "width_report.json").read_text())
    assert report["label"] == "Cs-6D5/2" and report["fwhm_ns"] > 0
    assert "FWHM" in capsys.readouterr().out


def test_simulate_diagnostics_and_no_normalize(tmp_path):
    out = tmp_path / "sim"
    rc = main(["simulate", "--preset", "Cs-8S1/2", "--out", str(out), *SHORT,
               "--override", "output.diagnostics=true", "--override", "toggles.normalize=false",
               "--override", "toggles.background_floor=0.5"])
    assert rc == EXIT_OK
    diag = json.loads((out / "diagnostics.json").read_text())
    assert len(diag["points"]) == 601
    final = read_csv(out / "final_trace.csv")
    assert min(final["g2"]) == pytest.approx(0.5)


def test_simulate_from_config_file(tmp_path):
    cfg = tmp_path / "m.yaml"
    cfg.write_text(yaml.safe_dump({"preset": "Cs-8S1/2",
                                   "tau_grid": {"start_ns": -2, "step_ns": 0.05,
                                                "n_points": 200},
                                   "output": {"dir": str(tmp_path / "o")}}))
    assert main(["simulate", "--config", str(cfg)]) == EXIT_OK
    assert len(read_csv(tmp_path / "o" / "raw_trace.csv")["tau_ns"]) == 200


def test_schema_error_exit_code(tmp_path, capsys):
    rc = main(["simulate", "--preset", "Cs-6D5/2", "--out", str(tmp_path),
               "--override", "tau_grid.n_points=1", "--override", "jitter.fwhm_ns=-1"])
    assert rc == EXIT_SCHEMA
    err = capsys.readouterr().err
    assert "n_points" in err and "fwhm_ns" in err


def test_unknown_preset_exit_code(tmp_path):
    assert main(["info", "--preset", "nope"]) == EXIT_SCHEMA


def test_convergence_exit_code(tmp_path, capsys):
    rc = main(["simulate", "--preset", "Cs-8S1/2", "--out", str(tmp_path), *SHORT,
               "--override", "quadrature.nodes_per_panel=2",
               "--override", "quadrature.base_panels=2",
               "--override", "quadrature.max_subdivisions=1"])
    assert rc == EXIT_CONVERGENCE
    assert "tau index 100" in capsys.readouterr().err


def test_sweep_shape_and_determinism(tmp_path):
    args = ["sweep", "--preset", "Cs-8S1/2", "--override", "sweep.lambda_min_nm=780",
            "--override", "sweep.lambda_max_nm=930", "--override", "sweep.n_steps=4",
            "--override", "tau_grid.start_ns=-1", "--override", "tau_grid.step_ns=0.05",
            "--override", "tau_grid.n_points=160"]
    assert main([*args, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main([*args, "--out", str(tmp_path / "b")]) == EXIT_OK
    a = (tmp_path / "a" / "sweep_surface.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep_surface.csv").read_bytes()
    assert len(a.decode().splitlines()) == 1 + 4 * 160
    summary = json.loads((tmp_path / "a" / "sweep_summary.json").read_text())
    assert [round(r["lambda_c_nm"]) for r in summary["rows"]] == [780, 830, 880, 930]


def test_decompose_both_presets(tmp_path):
    out = tmp_path / "dec"
    for preset in ("Cs-6D5/2", "Cs-8S1/2"):
        assert main(["decompose", "--preset", preset, "--out", str(out),
                     "--override", "decompose.tau_ns=[0, -1]"]) == EXIT_OK
    files = sorted(p.name for p in out.iterdir())
    assert len(files) == 4
    zero = read_csv(out / "decompose_Cs-6D5_2_tau_+0.0000ns.csv")
    assert list(zero) == ["v_mps", "weighted_amplitude", "phase_rad"]
    j = zero["v_mps"].index(0.0)
    assert zero["phase_rad"][j] == math.pi / 2
    neg = read_csv(out / "decompose_Cs-8S1_2_tau_-1.0000ns.csv")
    assert all(a == 0 for a in neg["weighted_amplitude"])


@pytest.mark.parametrize(
    "preset, dv, ratio, diff",
    [("Cs-6D5/2", "31.3 m/s", "1.08", "65 nm"), ("Cs-8S1/2", "20.2 m/s", "0.93", "57 nm")],
)
def test_info(preset, dv, ratio, diff, capsys):
    assert main(["info", "--preset", preset]) == EXIT_OK
    out = capsys.readouterr().out
    lines = {line[:23].strip(): line[23:].strip() for line in out.splitlines()}
    assert lines["Delta v_two"] == dv
    assert lines["lambda_c : lambda_p"] == ratio
    assert lines["|lambda_p - lambda_c|"] == diff
    for key in ("k_p", "k_c", "u(T)", "Doppler FWHM (pump)"):
        assert key in lines


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "biphoton_waveform.cli", "info", "--preset",
                          "Cs-8S1/2"], capture_output=True, text=True)
    assert out.returncode == 0 and "20.2 m/s" in out.stdout
