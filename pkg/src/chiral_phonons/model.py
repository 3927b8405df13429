"""Deterministic ingredients of the ring model.

Mode grids, optical/pump parameters, the phase-matching function and the
frequency-dependent matrices entering the phonon linear response

    chi(omega) = [D(omega) - M(omega) - E]^-1

where ``D`` is the bare inverse susceptibility, ``M`` the rank-one optical
term obtained after eliminating the probe mode, and ``E`` the disorder
scattering matrix (see :mod:`chiral_phonons.disorder`).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HBAR = 1.054571817e-34

PHASE_MATCH_MODELS = ("eq13", "lorentzian")


class ParameterError(ValueError):
    """Raised for physically invalid model parameters."""


@dataclass(frozen=True)
class ModeGrid:
    """Symmetric, uniformly spaced set of phonon wavevectors.

    ``wavevectors`` is sorted ascending and contains ``q`` and ``-q`` for
    every mode; ``q = 0`` is never included.
    """

    wavevectors: np.ndarray
    sound_speed: float
    spacing: float

    def __post_init__(self):
        q = np.asarray(self.wavevectors, dtype=float)
        q.setflags(write=False)
        object.__setattr__(self, "wavevectors", q)

    @property
    def size(self) -> int:
        return self.wavevectors.size

    @property
    def frequencies(self) -> np.ndarray:
        # |q| v keeps counter-propagating partners degenerate
        return np.abs(self.wavevectors) * self.sound_speed

    @property
    def density_of_states(self) -> float:
        return 1.0 / (self.sound_speed * self.spacing)

    def index_of(self, q: float) -> int:
        """Index of the grid mode closest to ``q``."""
        return int(np.argmin(np.abs(self.wavevectors - q)))

    def partner(self, index: int) -> int:
        """Index of the counter-propagating partner of mode ``index``."""
        return self.size - 1 - index


@dataclass(frozen=True)
class OptoParams:
    """Pump/probe optical parameters.

    detuning : Delta = omega_c - omega_p, negative for a red-detuned pump.
    kappa : optical energy decay rate.
    coupling_speed : pump-enhanced coupling c_cl (angular speed units).
    q_center : phase-matching wavevector Delta k = k' - k.
    optical_spatial_width : kappa / c.
    phonon_width : gamma / (2 v).
    """

    detuning: float
    kappa: float
    coupling_speed: float
    q_center: float
    optical_spatial_width: float = 0.0
    phonon_width: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ParameterError(f"kappa must be positive, got {self.kappa}")
        if self.coupling_speed < 0:
            raise ParameterError("coupling_speed must be non-negative")
        if self.optical_spatial_width < 0 or self.phonon_width < 0:
            raise ParameterError("phase-matching widths must be non-negative")

    @property
    def total_width(self) -> float:
        return self.phonon_width + self.optical_spatial_width

    @property
    def sideband_resolved(self) -> bool:
        return self.kappa < abs(self.detuning)

    def with_coupling(self, coupling_speed: float) -> "OptoParams":
        return OptoParams(
            self.detuning,
            self.kappa,
            coupling_speed,
            self.q_center,
            self.optical_spatial_width,
            self.phonon_width,
        )


@dataclass(frozen=True)
class MaterialConstants:
    """Inputs of the linearized coupling speed.

    ``x_zpf`` is taken as an opaque number; no unit convention is imposed.
    """

    photon_frequency: float
    x_zpf: float
    photoelastic_ratio: float
    pump_amplitude: float

    def __post_init__(self):
        if self.pump_amplitude < 0:
            raise ParameterError("pump amplitude is real and non-negative")


@dataclass(frozen=True)
class PhononDamping:
    """Intrinsic damping rate, identical for every mode."""

    gamma: float = field(default=1e-3)

    def __post_init__(self):
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")


def build_mode_grid(n_pairs: int, spacing: float, sound_speed: float, q_offset: float) -> ModeGrid:
    """Grid of ``2 * n_pairs`` modes at ``±(q_offset + j * spacing)``.

    Parameters
    ----------
    n_pairs : int
        Number of counter-propagating pairs (>= 1).
    spacing : float
        Mode spacing ``Δq`` (> 0).
    sound_speed : float
        Angular sound speed ``v`` (> 0).
    q_offset : float
        Smallest positive wavevector; must be > 0 so that ``q = 0`` is
        excluded.
    """
    if n_pairs < 1:
        raise ParameterError("n_pairs must be >= 1")
    if not spacing > 0:
        raise ParameterError(f"mode spacing must be positive, got {spacing}")
    if not sound_speed > 0:
        raise ParameterError(f"sound speed must be positive, got {sound_speed}")
    if not q_offset > 0:
        raise ParameterError("q_offset must be positive (q = 0 is excluded)")
    positive = q_offset + spacing * np.arange(n_pairs)
    q = np.concatenate([-positive[::-1], positive])
    return ModeGrid(q, float(sound_speed), float(spacing))


def centered_grid(q_center: float, spacing: float, sound_speed: float, band_width: float) -> ModeGrid:
    """Grid with a mode exactly at ``±q_center`` and a band at least
    ``band_width`` wide on each branch."""
    half = int(np.ceil(0.5 * band_width / spacing))
    if q_center - half * spacing <= 0:
        raise ParameterError("band reaches q = 0; reduce band_width or raise q_center")
    return build_mode_grid(2 * half + 1, spacing, sound_speed, q_center - half * spacing)


def phase_match_f(q, opto: OptoParams):
    """Finite-width phase-matching function ``w / (w + i (q - q_c))``."""
    w = opto.total_width
    if not w > 0:
        raise ParameterError("phase-matching width gamma/2v + kappa/c must be positive")
    dq = np.asarray(q, dtype=float) - opto.q_center
    return w / (w + 1j * dq)


def lorentzian_weight(q, q_center: float, half_width: float):
    """Idealized ``|q f(q)|^2``: a Lorentzian of peak ``q_c^2`` at ``q_c``."""
    if not half_width > 0:
        raise ParameterError("half_width must be positive")
    dq = np.asarray(q, dtype=float) - q_center
    return q_center**2 * half_width**2 / (half_width**2 + dq**2)


def coupling_from_material(m: MaterialConstants) -> float:
    """c_cl = (hbar omega_k / 8 pi) x_zpf (d eps / eps0 ds) alpha."""
    return HBAR * m.photon_frequency / (8 * np.pi) * m.x_zpf * m.photoelastic_ratio * m.pump_amplitude


def coupling_vector(grid: ModeGrid, opto: OptoParams, model: str = "eq13") -> np.ndarray:
    """Unnormalized optical mode vector with components ``c_cl q f(q)``.

    With ``model="lorentzian"`` the prefactor ``q`` is frozen at ``q_c`` so
    that ``|component|^2`` equals :func:`lorentzian_weight` times ``c_cl^2``.
    """
    q = grid.wavevectors
    f = phase_match_f(q, opto)
    if model == "eq13":
        return opto.coupling_speed * q * f
    if model == "lorentzian":
        return opto.coupling_speed * opto.q_center * f
    raise ParameterError(f"unknown phase-match model {model!r}; expected one of {PHASE_MATCH_MODELS}")


def optical_denominator(opto: OptoParams, omega):
    return (-opto.detuning - np.asarray(omega)) - 0.5j * opto.kappa


def matrix_D(grid: ModeGrid, damping: PhononDamping, omega: float) -> np.ndarray:
    return np.diag(grid.frequencies - omega - 0.5j * damping.gamma)


def matrix_M(grid: ModeGrid, opto: OptoParams, omega: float, model: str = "eq13") -> np.ndarray:
    u = coupling_vector(grid, opto, model)
    return np.outer(u, u.conj()) / optical_denominator(opto, omega)
