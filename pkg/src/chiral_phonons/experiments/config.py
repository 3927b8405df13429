"""Scenario configuration: JSON files validated against a versioned schema.

Units follow the model: wavevectors in 1/angle, the sound speed in
angle/time, every rate (gamma, kappa, g, detuning) in 1/time.  Quantities
with a ``_gammas`` or ``_over_gamma`` suffix are in units of the intrinsic
damping ``gamma`` (for ``band_width_gammas`` that means ``gamma / v``).
"""
from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

SCHEMA_VERSION = "1.0"


class ConfigError(ValueError):
    pass


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "chiral-phonons scenario",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "scenario": {"enum": ["fig2", "fig4", "custom"]},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "output_dir": {"type": "string"},
        "convention": {"enum": ["subtracted", "raw"]},
        "phase_match": {"enum": ["eq13", "lorentzian"]},
        "linewidth_method": {"enum": ["resonant", "lorentzian-fit"]},
        "sound_speed": _pos,
        "q_center": _pos,
        "mode_spacing": _pos,
        "n_pairs": {"type": ["integer", "null"], "minimum": 1},
        "band_width_gammas": _pos,
        "gammas": {"type": "array", "items": _pos, "minItems": 1},
        "kappa_over_gamma": _pos,
        "detuning": {"type": ["number", "null"]},
        "optical_spatial_width": _nonneg,
        "disorder_broadening": _nonneg,
        "disorder_strength": {"type": ["number", "null"], "minimum": 0},
        "coupling_model": {"enum": ["deterministic", "random"]},
        "coupling_g_over_gamma": _nonneg,
        "pump_x": {"type": "array", "items": _nonneg, "minItems": 1},
        "gamma_opt_over_gamma": {"type": "array", "items": _nonneg, "minItems": 1},
        "n_omega": {"type": "integer", "minimum": 16},
        "omega_half_span_gammas": _pos,
        "n_realizations": {"type": "integer", "minimum": 1},
        "n_blocks": {"type": "integer", "minimum": 1},
        "workers": {"type": "integer", "minimum": 1},
        "dump_disorder": {"type": "boolean"},
    },
    "required": ["scenario"],
}


@dataclass
class ScenarioConfig:
    scenario: str
    seed: int = 20170101
    output_dir: str = "out"
    convention: str = "subtracted"
    phase_match: str = "eq13"
    linewidth_method: str = "lorentzian-fit"
    sound_speed: float = 1.0
    q_center: float = 1.0
    mode_spacing: float = 5e-3
    n_pairs: int | None = 2
    band_width_gammas: float = 20.0
    gammas: list = field(default_factory=lambda: [1e-3])
    kappa_over_gamma: float = 200.0
    detuning: float | None = None
    optical_spatial_width: float = 0.0
    disorder_broadening: float = 0.0
    disorder_strength: float | None = None
    coupling_model: str = "deterministic"
    coupling_g_over_gamma: float = 0.1
    pump_x: list = field(default_factory=lambda: [0.0])
    gamma_opt_over_gamma: list = field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0, 4.0])
    n_omega: int = 601
    omega_half_span_gammas: float = 15.0
    n_realizations: int = 1
    n_blocks: int = 1
    workers: int = 1
    dump_disorder: bool = False
    schema_version: str = SCHEMA_VERSION

    @property
    def omega_c(self) -> float:
        return self.q_center * self.sound_speed

    @property
    def pump_detuning(self) -> float:
        # anti-Stokes resonance with the phase-matched phonon
        return -self.omega_c if self.detuning is None else self.detuning

    def to_dict(self) -> dict:
        return asdict(self)


_FIG4_X = [0.0] + [float(v) for v in np.geomspace(1e-3, 100.0, 11)]

DEFAULTS = {
    "fig2": dict(
        phase_match="eq13",
        linewidth_method="lorentzian-fit",
        mode_spacing=5e-3,
        n_pairs=2,
        gammas=[1e-3],
        kappa_over_gamma=200.0,
        coupling_model="deterministic",
        coupling_g_over_gamma=0.1,
        gamma_opt_over_gamma=[0.0, 0.5, 1.0, 2.0, 4.0],
        n_omega=601,
        omega_half_span_gammas=15.0,
        n_realizations=1,
        n_blocks=1,
        output_dir="out/fig2",
    ),
    "fig4": dict(
        phase_match="lorentzian",
        linewidth_method="resonant",
        mode_spacing=1e-4,
        n_pairs=None,
        band_width_gammas=20.0,
        gammas=[2e-4, 5e-4, 1e-3],
        kappa_over_gamma=100.0,
        disorder_broadening=0.1,
        pump_x=_FIG4_X,
        n_omega=161,
        omega_half_span_gammas=3.0,
        n_realizations=1600,
        n_blocks=16,
        output_dir="out/fig4",
    ),
    "custom": {},
}


def validate_dict(data: dict) -> None:
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from exc


def check_regime(cfg: ScenarioConfig) -> None:
    """Mode-spacing guards, run before any heavy computation."""
    for gamma in cfg.gammas:
        ratio = cfg.mode_spacing / (gamma / cfg.sound_speed)
        if cfg.scenario == "fig2" and not ratio > 1:
            raise ConfigError(
                f"fig2 needs resolved modes (spacing > gamma/v) so only one mode is phase matched; "
                f"got spacing = {ratio:.3g} gamma/v for gamma = {gamma}"
            )
        if cfg.scenario == "fig4" and not ratio < 1:
            raise ConfigError(
                f"fig4 needs overlapping modes (spacing < gamma/v) to approach the continuum; "
                f"got spacing = {ratio:.3g} gamma/v for gamma = {gamma}"
            )
    if cfg.scenario == "fig4" and 0.0 not in cfg.pump_x:
        raise ConfigError("fig4 pump_x must include the pump-off point x = 0")
    if cfg.n_blocks > cfg.n_realizations:
        raise ConfigError("n_blocks cannot exceed n_realizations")


def build_config(data: dict, overrides: dict | None = None) -> ScenarioConfig:
    data = copy.deepcopy(data)
    for key, val in (overrides or {}).items():
        if val is not None:
            data[key] = val
    validate_dict(data)
    merged = dict(DEFAULTS[data["scenario"]])
    merged.update(data)
    cfg = ScenarioConfig(**merged)
    check_regime(cfg)
    return cfg


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return build_config(data, overrides)
