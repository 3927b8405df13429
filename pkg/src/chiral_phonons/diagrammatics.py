"""Analytic disorder-averaged propagator.

The optical term is rank one, ``M = lambda |phi><phi|``, so the optically
dressed propagator resums in closed form,

    G_M = D^-1 + eta D^-1 P D^-1,      eta = 1 / (1/lambda - g),

with ``g = <phi|D^-1|phi>``.  Factorizing the disorder average once gives
``<G> = (D - M - Sigma_D - Sigma_P)^-1`` where

    Sigma_D = U^2 sum_k (D^-1)_kk                (plain disorder diffusion)
    Sigma_P = eta U^2 <phi|D^-2|phi>             (optically suppressed backscattering)

Each quantity is available as an exact finite-grid sum and, where one
exists, as its continuum closed form.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import (
    ModeGrid,
    OptoParams,
    PhononDamping,
    coupling_vector,
    optical_denominator,
    phase_match_f,
)


class PoleError(ZeroDivisionError):
    """``1/lambda = g``: the rank-one series has no finite sum."""


class UndefinedError(ValueError):
    """Quantity requires a non-zero optical mode vector."""


@dataclass(frozen=True)
class RankOneData:
    phi_tilde: np.ndarray
    norm2: float
    lam: complex
    g: complex

    @property
    def phi(self) -> np.ndarray:
        if self.norm2 == 0:
            raise UndefinedError("N^2 = 0: optical mode vector vanishes")
        return self.phi_tilde / np.sqrt(self.norm2)

    @property
    def projector(self) -> np.ndarray:
        phi = self.phi
        return np.outer(phi, phi.conj())

    @property
    def eta(self) -> complex:
        return eta(self.lam, self.g)

    @property
    def kappa_shift(self) -> float:
        """``Re(-2 i N^2 g)``: broadening of the optical linewidth by the phonon band."""
        return float(2 * self.norm2 * self.g.imag)


def _bare_inverse(grid: ModeGrid, damping: PhononDamping, omega: float) -> np.ndarray:
    return 1.0 / (grid.frequencies - omega - 0.5j * damping.gamma)


def rank_one(grid: ModeGrid, opto: OptoParams, damping: PhononDamping, omega: float, phase_match: str = "eq13") -> RankOneData:
    phi_t = coupling_vector(grid, opto, phase_match)
    w = np.abs(phi_t) ** 2
    norm2 = float(w.sum())
    lam = norm2 / optical_denominator(opto, omega)
    g = complex(np.sum(w * _bare_inverse(grid, damping, omega)) / norm2) if norm2 > 0 else np.nan
    return RankOneData(phi_t, norm2, complex(lam), g)


def eta(lam: complex, g: complex) -> complex:
    if lam == 0:
        return 0j
    den = 1.0 / lam - g
    if abs(den) <= 1e-300 or abs(den) <= 1e-14 * abs(1.0 / lam):
        raise PoleError("1/lambda equals g")
    return 1.0 / den


def resum_GM(D, lam: complex, P) -> np.ndarray:
    """``(D - lambda P)^-1`` for a rank-one projector ``P`` via the geometric series.

    ``D`` may be a diagonal matrix or the vector of its diagonal.
    """
    D = np.asarray(D)
    d = np.diag(D) if D.ndim == 2 else D
    Dinv = 1.0 / d
    if lam == 0:
        return np.diag(Dinv)
    P = np.asarray(P)
    g = np.trace(Dinv[:, None] * P)
    DPD = Dinv[:, None] * P * Dinv[None, :]
    return np.diag(Dinv) + eta(lam, g) * DPD


def _coupling_weight(q, opto: OptoParams, phase_match: str):
    """``|c_cl q f(q)|^2`` at arbitrary (off-grid) ``q``."""
    f = phase_match_f(q, opto)
    pref = q if phase_match == "eq13" else opto.q_center
    return opto.coupling_speed**2 * np.abs(pref * f) ** 2


def scalar_g(
    grid: ModeGrid,
    opto: OptoParams,
    damping: PhononDamping,
    omega: float,
    method: str = "exact-sum",
    phase_match: str = "eq13",
) -> complex:
    """``g(omega) = <phi|D^-1|phi>``.

    ``"resonance-approx"`` keeps only the pole of the phase-matched branch,
    ``(pi/2) i rho |c q_w f(q_w)|^2 / N^2`` with ``Omega(q_w) = omega``.
    """
    data = rank_one(grid, opto, damping, omega, phase_match)
    if data.norm2 == 0:
        raise UndefinedError("N^2 = 0")
    if method == "exact-sum":
        return data.g
    if method == "resonance-approx":
        q_w = np.sign(opto.q_center) * omega / grid.sound_speed
        num = 0.5 * np.pi * grid.density_of_states * _coupling_weight(q_w, opto, phase_match)
        return 1j * num / data.norm2
    raise ValueError(f"unknown method {method!r}")


def g_lorentzian(omega, omega_c: float, gamma: float):
    return 0.25j * gamma / ((omega - omega_c) ** 2 + 0.25 * gamma**2)


def W0_lorentzian(omega, omega_c: float, gamma: float):
    return 0.25 / ((omega - omega_c) ** 2 + 0.25 * gamma**2)


def norm2_lorentzian(c_cl: float, q_c: float, rho: float, gamma: float) -> float:
    return c_cl**2 * q_c**2 * rho * np.pi * gamma / 2


def kappa_tilde(kappa: float, rho: float, c_cl: float, q_omega: float, f_val) -> float:
    """Optical linewidth broadened by absorption into the phonon band."""
    return kappa + np.pi * rho * c_cl**2 * q_omega**2 * abs(f_val) ** 2


def W0(grid: ModeGrid, opto: OptoParams, damping: PhononDamping, omega: float, phase_match: str = "eq13", exclude=None) -> complex:
    """``-<phi|D^-2|phi>`` as an exact finite sum."""
    data = rank_one(grid, opto, damping, omega, phase_match)
    if data.norm2 == 0:
        raise UndefinedError("N^2 = 0")
    terms = np.abs(data.phi) ** 2 * _bare_inverse(grid, damping, omega) ** 2
    if exclude is not None:
        terms = np.delete(terms, exclude)
    return complex(-terms.sum())


def sigma_D(grid: ModeGrid, damping: PhononDamping, strength: float, omega: float, method: str = "exact", exclude=None) -> complex:
    """Disorder self-energy (purely diagonal).

    ``exclude`` drops one mode from the sum; for the self-energy of mode
    ``i`` pass ``exclude=i`` since ``E_ii = 0``.
    """
    if method == "approx":
        return 2j * np.pi * grid.density_of_states * strength**2
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    terms = _bare_inverse(grid, damping, omega)
    if exclude is not None:
        terms = np.delete(terms, exclude)
    return complex(strength**2 * terms.sum())


def _is_backward(grid: ModeGrid, opto: OptoParams, mode: int, phase_match: str) -> bool:
    peak = _coupling_weight(opto.q_center, opto.with_coupling(1.0), phase_match)
    here = _coupling_weight(grid.wavevectors[mode], opto.with_coupling(1.0), phase_match)
    return here <= 1e-2 * peak


def sigma_P(
    grid: ModeGrid,
    opto: OptoParams,
    damping: PhononDamping,
    strength: float,
    omega: float,
    mode: int,
    method: str = "exact",
    phase_match: str = "eq13",
) -> complex:
    """Optical correction ``-eta U^2 W0`` to the diagonal self-energy of ``mode``.

    Defined only for backward-band modes (``|f(q)| ~ 0``); forward modes are
    dominated by ``M`` and raise ``ValueError``.  ``method="lorentzian"``
    uses the continuum closed forms for a Lorentzian ``|q f|^2`` of full
    width ``gamma / v`` evaluated with the resonance ``kappa~``.
    """
    if not _is_backward(grid, opto, mode, phase_match):
        raise ValueError("sigma_P applies to backward-propagating modes only")
    if opto.coupling_speed == 0 or strength == 0:
        return 0j
    if method == "exact":
        data = rank_one(grid, opto, damping, omega, phase_match)
        return -data.eta * strength**2 * W0(grid, opto, damping, omega, phase_match, exclude=mode)
    if method == "lorentzian":
        gamma = damping.gamma
        rho = grid.density_of_states
        omega_c = abs(opto.q_center) * grid.sound_speed
        n2 = norm2_lorentzian(opto.coupling_speed, opto.q_center, rho, gamma)
        kt = opto.kappa - 2 * (1j * n2 * g_lorentzian(omega, omega_c, gamma)).real
        eta_val = n2 / ((-opto.detuning - omega) - 0.5j * kt)
        return complex(-eta_val * strength**2 * W0_lorentzian(omega, omega_c, gamma))
    raise ValueError(f"unknown method {method!r}")


def born_diffusion_ratio(
    grid: ModeGrid,
    opto: OptoParams,
    damping: PhononDamping,
    omega: float,
    mode: int,
    phase_match: str = "eq13",
) -> float:
    """``Im(Sigma_D + Sigma_P) / Im(Sigma_D)`` from exact finite-grid sums.

    Independent of the disorder strength.
    """
    sd = sigma_D(grid, damping, 1.0, omega, exclude=mode)
    sp = sigma_P(grid, opto, damping, 1.0, omega, mode, "exact", phase_match)
    return float((sd + sp).imag / sd.imag)


def diffusion_ratio(x, rho: float, gamma: float):
    """Closed-form normalized diffusion ``1 - (x/2) / (1 + pi rho gamma x)``.

    ``x = c_cl^2 q_c^2 / (gamma kappa)`` is the normalized pump power.
    """
    x = np.asarray(x, dtype=float)
    out = 1.0 - 0.5 * x / (1.0 + x * np.pi * rho * gamma)
    return out if out.ndim else float(out)


def pump_power(c_cl: float, q_c: float, gamma: float, kappa: float) -> float:
    return c_cl**2 * q_c**2 / (gamma * kappa)


def coupling_for_power(x, q_c: float, gamma: float, kappa: float):
    return np.sqrt(np.asarray(x, dtype=float) * gamma * kappa) / abs(q_c)


def write_predictions_csv(path, rows) -> Path:
    """Rows of ``(x, rho_gamma, diffusion_ratio, sigmaD_im, sigmaP_im, kappa_tilde)``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "rho_gamma", "diffusion_ratio", "sigmaD_im", "sigmaP_im", "kappa_tilde"])
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
    return path
