"""Experiment manifests: YAML files in lab units (MHz, nm, ns, degC).

A manifest names either a ``preset`` or gives explicit ``system`` and ``drive``
blocks, never both. Linewidths, detunings and Rabi frequencies are ordinary
frequencies in MHz and are multiplied by 2 pi on load. Unspecified blocks take
the defaults in :data:`DEFAULTS`.
"""
from __future__ import annotations

import copy
import math
import os
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import yaml

from .biphoton import WavefunctionParams
from .correlator import QuadratureSpec, TauGrid
from .detector import JitterModel
from .errors import BiphotonError, InvalidParameterError, ManifestError
from .model import (
    CS133_MASS,
    PRESET_TABLE,
    TWO_PI,
    CascadeSystem,
    DriveConfig,
    ThermalEnsemble,
)

_MHZ = TWO_PI * 1e6

DEFAULT_DRIVE = {"delta_p_mhz": 0.0, "omega_c_mhz": 5.0, "coefficient": [0.0, 1.0]}

DEFAULTS = {
    "ensemble": {"temperature_c": 85.0, "mass_kg": CS133_MASS},
    "tau_grid": {"start_ns": -5.0, "step_ns": 0.01, "n_points": 2001},
    "quadrature": {
        "cutoff_sigmas": 6.0,
        "base_panels": 32,
        "refinement_tolerance": 1e-10,
        "max_subdivisions": 20000,
        "nodes_per_panel": 16,
    },
    "jitter": {"fwhm_ns": 0.35, "kernel_support_sigmas": 6.0},
    "output": {"dir": "out", "diagnostics": False},
    "toggles": {"normalize": True, "background_floor": 0.0, "floor_before_normalize": False},
    "decompose": {"tau_ns": [0.0], "v_min_mps": -300.0, "v_max_mps": 300.0, "n_points": 1201},
    "sweep": {"lambda_min_nm": 700.0, "lambda_max_nm": 1000.0, "n_steps": 61, "include_nm": []},
    "runtime": {"n_jobs": 1},
}

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}


def _block(props, required=()):
    return {
        "type": "object",
        "properties": props,
        "required": list(required),
        "additionalProperties": False,
    }


SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "preset": {"type": "string", "enum": sorted(PRESET_TABLE)},
        "system": _block(
            {
                "label": {"type": "string"},
                "gamma_21_mhz": _pos,
                "gamma_3_mhz": _pos,
                "gamma_32_mhz": _pos,
                "gamma_32_prime_mhz": _pos,
            },
            required=("gamma_21_mhz",),
        ),
        "drive": _block(
            {
                "lambda_p_nm": _pos,
                "lambda_c_nm": _pos,
                "delta_p_mhz": _num,
                "omega_c_mhz": _nonneg,
                "coefficient": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
            },
            required=("lambda_p_nm", "lambda_c_nm"),
        ),
        "ensemble": _block(
            {"temperature_c": {"type": "number", "minimum": -273.15}, "temperature_k": _nonneg,
             "mass_kg": _pos}
        ),
        "tau_grid": _block(
            {"start_ns": _num, "step_ns": _pos, "n_points": {"type": "integer", "minimum": 2}}
        ),
        "quadrature": _block(
            {
                "cutoff_sigmas": {"type": "number", "minimum": 4},
                "base_panels": {"type": "integer", "minimum": 1},
                "refinement_tolerance": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e-3},
                "max_subdivisions": {"type": "integer", "minimum": 0},
                "nodes_per_panel": {"type": "integer", "minimum": 2},
            }
        ),
        "jitter": _block({"fwhm_ns": _pos, "kernel_support_sigmas": _pos}),
        "output": _block({"dir": {"type": "string", "minLength": 1},
                          "diagnostics": {"type": "boolean"}}),
        "toggles": _block(
            {"normalize": {"type": "boolean"}, "background_floor": _nonneg,
             "floor_before_normalize": {"type": "boolean"}}
        ),
        "decompose": _block(
            {"tau_ns": {"type": "array", "items": _num, "minItems": 1},
             "v_min_mps": _num, "v_max_mps": _num,
             "n_points": {"type": "integer", "minimum": 2}}
        ),
        "sweep": _block(
            {"lambda_min_nm": _pos, "lambda_max_nm": _pos,
             "n_steps": {"type": "integer", "minimum": 2},
             "include_nm": {"type": "array", "items": _pos}}
        ),
        "runtime": _block({"n_jobs": {"type": "integer", "minimum": 1}}),
    },
}


def expand_preset(name):
    """Explicit ``system``/``drive`` blocks equivalent to a named preset."""
    row = PRESET_TABLE[name]
    half = row["gamma_3_mhz"] / 2.0
    return {
        "system": {"label": name, "gamma_21_mhz": row["gamma_21_mhz"],
                   "gamma_32_mhz": half, "gamma_32_prime_mhz": half},
        "drive": {"lambda_p_nm": row["lambda_p_nm"], "lambda_c_nm": row["lambda_c_nm"],
                  **copy.deepcopy(DEFAULT_DRIVE)},
    }


def apply_overrides(tree, overrides):
    """Apply ``dotted.key=value`` overrides; values are parsed as YAML scalars.

    Overriding anything under ``system`` or ``drive`` on a preset manifest first
    replaces the preset by its explicit blocks.
    """
    tree = copy.deepcopy(tree)
    for item in overrides or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ManifestError([f"override {item!r} is not of the form KEY=VALUE"])
        path = key.strip().split(".")
        value = yaml.safe_load(raw)
        if path[0] in ("system", "drive") and tree.get("preset") in PRESET_TABLE:
            tree.update(expand_preset(tree.pop("preset")))
        node = tree
        for part in path[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[path[-1]] = value
    return tree


def _with_defaults(tree):
    out = copy.deepcopy(tree)
    for block, defaults in DEFAULTS.items():
        given = out.get(block)
        if given is None:
            out[block] = copy.deepcopy(defaults)
        elif isinstance(given, dict):
            merged = copy.deepcopy(defaults)
            merged.update(given)
            if block == "ensemble" and "temperature_k" in given and "temperature_c" not in given:
                merged.pop("temperature_c")
            out[block] = merged
    if isinstance(out.get("drive"), dict):
        out["drive"] = {**copy.deepcopy(DEFAULT_DRIVE), **out["drive"]}
    return out


def _finite_tree(tree):
    if isinstance(tree, dict):
        return all(_finite_tree(v) for v in tree.values())
    if isinstance(tree, list):
        return all(_finite_tree(v) for v in tree)
    if isinstance(tree, float):
        return math.isfinite(tree)
    return True


def _schema_violations(tree):
    validator = jsonschema.Draft202012Validator(SCHEMA)
    out = []
    for err in sorted(validator.iter_errors(tree), key=lambda e: [str(p) for p in e.absolute_path]):
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        out.append(f"{where}: {err.message}")
    return out


@dataclass(frozen=True)
class Manifest:
    """A validated manifest plus the simulator objects built from it."""

    tree: dict
    params: WavefunctionParams
    ensemble: ThermalEnsemble
    grid: TauGrid
    quad: QuadratureSpec
    jitter: JitterModel

    @property
    def output_dir(self):
        return Path(self.tree["output"]["dir"])

    @property
    def label(self):
        return self.params.system.label or "custom"

    def section(self, name):
        return self.tree[name]

    def dump(self):
        return dump_tree(self.tree)


def dump_tree(tree):
    return yaml.safe_dump(tree, sort_keys=True, default_flow_style=False)


def _build(tree, violations):
    def attempt(name, fn):
        try:
            return fn()
        except BiphotonError as exc:
            violations.append(f"{name}: {exc}")
        except (TypeError, ValueError, KeyError) as exc:
            violations.append(f"{name}: {exc}")
        return None

    if "preset" in tree:
        row = PRESET_TABLE[tree["preset"]]
        system = attempt("preset", lambda: CascadeSystem.from_linewidths(
            row["gamma_21_mhz"] * _MHZ, row["gamma_3_mhz"] * _MHZ, tree["preset"]))
        drive_block = {"lambda_p_nm": row["lambda_p_nm"], "lambda_c_nm": row["lambda_c_nm"],
                       **DEFAULT_DRIVE}
    else:
        sb = tree["system"]

        def make_system():
            has_total = "gamma_3_mhz" in sb
            has_split = "gamma_32_mhz" in sb or "gamma_32_prime_mhz" in sb
            if has_total == has_split:
                raise InvalidParameterError(
                    "give either gamma_3_mhz or both gamma_32_mhz and gamma_32_prime_mhz")
            label = sb.get("label", "")
            if has_total:
                return CascadeSystem.from_linewidths(
                    sb["gamma_21_mhz"] * _MHZ, sb["gamma_3_mhz"] * _MHZ, label)
            return CascadeSystem(sb["gamma_21_mhz"] * _MHZ, sb["gamma_32_mhz"] * _MHZ,
                                 sb["gamma_32_prime_mhz"] * _MHZ, label)

        system = attempt("system", make_system)
        drive_block = tree["drive"]

    def make_drive():
        re_c, im_c = drive_block["coefficient"]
        return DriveConfig(
            drive_block["lambda_p_nm"] / 1e9,
            drive_block["lambda_c_nm"] / 1e9,
            drive_block["delta_p_mhz"] * _MHZ,
            drive_block["omega_c_mhz"] * _MHZ,
            complex(re_c, im_c),
        )

    drive = attempt("drive", make_drive)

    eb = tree["ensemble"]

    def make_ensemble():
        if "temperature_k" in eb and "temperature_c" in eb:
            raise InvalidParameterError("give only one of temperature_k and temperature_c")
        kelvin = eb["temperature_k"] if "temperature_k" in eb else eb["temperature_c"] + 273.15
        return ThermalEnsemble(kelvin, eb["mass_kg"])

    ensemble = attempt("ensemble", make_ensemble)
    gb = tree["tau_grid"]
    grid = attempt("tau_grid", lambda: TauGrid.from_ns(gb["start_ns"], gb["step_ns"],
                                                       gb["n_points"]))
    quad = attempt("quadrature", lambda: QuadratureSpec(**tree["quadrature"]))
    jb = tree["jitter"]
    jitter = attempt("jitter", lambda: JitterModel(jb["fwhm_ns"] / 1e9,
                                                   jb["kernel_support_sigmas"]))
    if grid is not None and jitter is not None and grid.t_step > jitter.fwhm / 3.0:
        violations.append("tau_grid.step_ns: must not exceed jitter.fwhm_ns / 3")
    db = tree["decompose"]
    if not db["v_min_mps"] < db["v_max_mps"]:
        violations.append("decompose: v_min_mps must be smaller than v_max_mps")
    sw = tree["sweep"]
    if not sw["lambda_min_nm"] < sw["lambda_max_nm"]:
        violations.append("sweep: lambda_min_nm must be smaller than lambda_max_nm")
    params = WavefunctionParams(system, drive) if system and drive else None
    return params, ensemble, grid, quad, jitter


def _check_writable(directory, violations):
    path = Path(directory).resolve()
    probe = path
    while not probe.exists():
        probe = probe.parent
    if not probe.is_dir() or not os.access(probe, os.W_OK):
        violations.append(f"output.dir: {directory!r} is not writable")


def validate(tree, check_output=True):
    """Validate a raw manifest tree and build a :class:`Manifest`.

    :raises ManifestError: listing every violation found.
    """
    if tree is None:
        tree = {}
    if not isinstance(tree, dict):
        raise ManifestError(["manifest must be a mapping"])
    tree = _with_defaults(tree)
    violations = _schema_violations(tree)
    if not _finite_tree(tree):
        violations.append("<root>: numbers must be finite")
    has_preset = "preset" in tree
    has_explicit = "system" in tree or "drive" in tree
    if has_preset and has_explicit:
        violations.append("give either 'preset' or explicit 'system'/'drive' blocks, not both")
    elif not has_preset and not ("system" in tree and "drive" in tree):
        violations.append("manifest needs a 'preset' or both 'system' and 'drive' blocks")
    if violations:
        raise ManifestError(violations)
    built = _build(tree, violations)
    if check_output:
        _check_writable(tree["output"]["dir"], violations)
    if violations:
        raise ManifestError(violations)
    return Manifest(tree, *built)


def load_manifest(path=None, overrides=(), check_output=True):
    """Read a YAML manifest (or start from an empty one) and apply overrides."""
    tree = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                tree = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ManifestError([f"cannot read manifest {path}: {exc}"]) from None
        except yaml.YAMLError as exc:
            raise ManifestError([f"manifest {path} is not valid YAML: {exc}"]) from None
    return validate(apply_overrides(tree, overrides), check_output=check_output)


def tau_list(manifest):
    return [t / 1e9 for t in manifest.section("decompose")["tau_ns"]]
