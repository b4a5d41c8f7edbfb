"""Command-line front end.

Subcommands ``simulate``, ``sweep``, ``decompose`` and ``info`` read a YAML
manifest (``--config``), a preset (``--preset``), or both, apply ``--override``
edits, and write plot-ready CSV/JSON into ``--out``.

Exit codes: 0 success, 2 invalid manifest or parameters, 3 quadrature did not converge.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import kernels
from ._csvio import write_json
from .analysis import simulate, sweep_lambda_c
from .biphoton import decompose
from .correlator import write_diagnostics
from .errors import BiphotonError, ConvergenceError, ManifestError
from .manifest import load_manifest, tau_list
from .model import doppler_fwhm, two_photon_shift, velocity_acceptance

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_CONVERGENCE = 3

_NS = 1e-9
_NM = 1e-9


def _slug(label):
    return "".join(c if c.isalnum() or c in "-." else "_" for c in label)


def _manifest_from_args(args, check_output=True):
    overrides = list(args.override or [])
    if args.preset:
        overrides.insert(0, f"preset={args.preset}")
    if getattr(args, "out", None):
        overrides.append(f"output.dir={args.out}")
    return load_manifest(args.config, overrides, check_output=check_output)


def cmd_simulate(args):
    m = _manifest_from_args(args)
    toggles = m.section("toggles")
    diagnostics = [] if m.section("output")["diagnostics"] else None
    result = simulate(
        m.params, m.ensemble, m.grid, m.quad, m.jitter,
        normalize=toggles["normalize"],
        floor=toggles["background_floor"],
        floor_before_normalize=toggles["floor_before_normalize"],
        n_jobs=m.section("runtime")["n_jobs"],
        diagnostics=diagnostics,
    )
    out = m.output_dir
    out.mkdir(parents=True, exist_ok=True)
    result.raw.to_csv(out / "raw_trace.csv")
    result.convolved.to_csv(out / "convolved_trace.csv")
    final_name = "normalized_trace.csv" if toggles["normalize"] else "final_trace.csv"
    result.final.to_csv(out / final_name)
    write_json(out / "width_report.json", {"label": m.label, **result.report.to_dict()})
    (out / "manifest.yaml").write_text(m.dump(), encoding="utf-8")
    if diagnostics is not None:
        write_diagnostics(out / "diagnostics.json", diagnostics)
    print(f"{m.label}: FWHM {result.report.fwhm / _NS:.3f} ns "
          f"(peak at {result.report.peak_tau / _NS:.2f} ns) -> {out}")
    return EXIT_OK


def cmd_sweep(args):
    m = _manifest_from_args(args)
    sw = m.section("sweep")
    surface = sweep_lambda_c(
        sw["lambda_min_nm"] / 1e9, sw["lambda_max_nm"] / 1e9, sw["n_steps"],
        m.params, m.ensemble, m.grid, m.quad, m.jitter,
        include=[x / 1e9 for x in sw["include_nm"]],
        n_jobs=m.section("runtime")["n_jobs"],
    )
    out = m.output_dir
    out.mkdir(parents=True, exist_ok=True)
    surface.to_csv(out / "sweep_surface.csv")
    surface.write_summary(out / "sweep_summary.json")
    (out / "manifest.yaml").write_text(m.dump(), encoding="utf-8")
    failed = len(surface.errors)
    print(f"{m.label}: {len(surface.lambda_c_values)} rows, {failed} failed -> {out}")
    return EXIT_OK


def cmd_decompose(args):
    m = _manifest_from_args(args)
    db = m.section("decompose")
    v = np.linspace(db["v_min_mps"], db["v_max_mps"], db["n_points"])
    out = m.output_dir
    out.mkdir(parents=True, exist_ok=True)
    for tau in tau_list(m):
        dec = decompose(tau, v, m.params, m.ensemble.u)
        path = out / f"decompose_{_slug(m.label)}_tau_{tau / _NS:+.4f}ns.csv"
        dec.to_csv(path)
        print(path)
    return EXIT_OK


def info_lines(m):
    """Human-readable kinematics summary for a manifest's level scheme."""
    d, s, u = m.params.drive, m.params.system, m.ensemble.u
    lines = [
        f"label                  {m.label}",
        f"lambda_p               {d.lambda_p / _NM:.1f} nm",
        f"lambda_c               {d.lambda_c / _NM:.1f} nm",
        f"|lambda_p - lambda_c|  {abs(d.lambda_p - d.lambda_c) / _NM:.0f} nm",
        f"lambda_c : lambda_p    {d.lambda_c / d.lambda_p:.2f}",
        f"k_p                    {d.k_p:.6e} rad/m",
        f"k_c                    {d.k_c:.6e} rad/m",
        f"Gamma_3                2pi x {s.gamma_3 / (2 * math.pi) / 1e6:.3f} MHz",
        f"Gamma_21               2pi x {s.gamma_21 / (2 * math.pi) / 1e6:.3f} MHz",
    ]
    try:
        dv = velocity_acceptance(s.gamma_3, d.k_p, d.k_c)
        lines.append(f"Delta v_two            {dv:.1f} m/s")
    except BiphotonError as exc:
        lines.append(f"Delta v_two            undefined ({exc})")
    shift = two_photon_shift(d.k_p, d.k_c, 100.0)
    fwhm_hz = doppler_fwhm(d.lambda_p, u)
    lines += [
        f"omega_two(v=+100 m/s)  {shift:+.4e} rad/s",
        f"temperature            {m.ensemble.temperature:.2f} K",
        f"u(T)                   {u:.1f} m/s",
        f"Doppler FWHM (pump)    {fwhm_hz / 1e6:.1f} MHz",
        f"1 / Doppler FWHM       {1e9 / fwhm_hz:.3f} ns",
        f"kernel                 {kernels.IMPLEMENTATION}",
    ]
    return lines


def cmd_info(args):
    m = _manifest_from_args(args, check_output=False)
    print("\n".join(info_lines(m)))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="biphoton",
        description="Doppler-averaged biphoton temporal waveforms of cascade-type SFWM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "simulate": (cmd_simulate, "raw, convolved and normalized g2 traces plus width report"),
        "sweep": (cmd_sweep, "coupling-wavelength sweep of the normalized g2 surface"),
        "decompose": (cmd_decompose, "amplitude and phase of psi_v versus velocity"),
        "info": (cmd_info, "kinematic constants of a level scheme"),
    }
    for name, (fn, help_text) in handlers.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="YAML manifest")
        p.add_argument("--preset", metavar="NAME", help="named level scheme, e.g. Cs-6D5/2")
        if name != "info":
            p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--override", metavar="KEY=VALUE", action="append",
                       help="dotted-path manifest override, repeatable")
        p.set_defaults(handler=fn)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ConvergenceError as exc:
        where = "" if exc.tau_index is None else f" (tau index {exc.tau_index})"
        print(f"error: {exc}{where}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except BiphotonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
