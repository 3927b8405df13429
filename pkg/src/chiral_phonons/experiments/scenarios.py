"""Scenario runners: the few-mode response (fig2) and the power sweep (fig4)."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..diagrammatics import born_diffusion_ratio, coupling_for_power, diffusion_ratio
from ..disorder import DisorderConfig, DisorderSampler, write_matrix_csv
from ..ensemble import (
    FitError,
    LinewidthEstimate,
    RangeError,
    fit_lorentzian,
    normalized_diffusion,
    resonant_damping,
    solve_chi_modes,
)
from ..model import ModeGrid, OptoParams, PhononDamping, build_mode_grid, centered_grid
from ..single_mode import MinimalParams, gamma_pair, pair_coupling_matrix
from .config import ConfigError, ScenarioConfig, check_regime
from .fitting import SaturatingFit, fit_saturating

log = logging.getLogger(__name__)


def _opto(cfg: ScenarioConfig, gamma: float, coupling: float = 0.0) -> OptoParams:
    return OptoParams(
        detuning=cfg.pump_detuning,
        kappa=cfg.kappa_over_gamma * gamma,
        coupling_speed=coupling,
        q_center=cfg.q_center,
        optical_spatial_width=cfg.optical_spatial_width,
        phonon_width=gamma / (2 * cfg.sound_speed),
    )


def _omega_grid(cfg: ScenarioConfig, gamma: float) -> np.ndarray:
    span = cfg.omega_half_span_gammas * gamma
    return cfg.omega_c + np.linspace(-span, span, cfg.n_omega)


def _estimate(method, omega, chi_qq, omega_q, mode_q, gamma_ref, n_excluded=0) -> LinewidthEstimate:
    if method == "resonant":
        return LinewidthEstimate(float(mode_q), float(omega_q), resonant_damping(omega, chi_qq, omega_q), 0.0, "resonant", n_excluded)
    return fit_lorentzian(omega, chi_qq, mode_q=mode_q, n_excluded=n_excluded)


@dataclass
class Fig2Result:
    config: ScenarioConfig
    grid: ModeGrid
    omega: np.ndarray
    gamma: float
    g: float
    gamma_opt: np.ndarray
    modes: dict  # name -> grid index
    chi: np.ndarray  # (n_pump, n_omega, 2): CW, CCW
    estimates: list  # per pump: (cw, ccw) LinewidthEstimate
    predictions: list  # per pump: (gamma_plus, gamma_minus)
    n_excluded: int = 0


def run_fig2(cfg: ScenarioConfig) -> Fig2Result:
    """Few resolved modes, one phase-matched pair coupled by ``g``."""
    check_regime(cfg)
    if len(cfg.gammas) != 1:
        raise ConfigError("fig2 takes exactly one gamma")
    gamma = cfg.gammas[0]
    n_pairs = cfg.n_pairs or 2
    grid = build_mode_grid(n_pairs, cfg.mode_spacing, cfg.sound_speed, cfg.q_center)
    damping = PhononDamping(gamma)
    g = cfg.coupling_g_over_gamma * gamma
    if cfg.coupling_model == "deterministic":
        disorder = pair_coupling_matrix(grid, g)
    else:
        disorder = DisorderConfig(g, cfg.seed)
    opto = _opto(cfg, gamma)
    gopt = np.array(sorted(cfg.gamma_opt_over_gamma), dtype=float) * gamma
    # gamma_opt = 4 (c q_c f(q_c))^2 / kappa with f(q_c) = 1
    couplings = np.sqrt(gopt * opto.kappa) / (2 * cfg.q_center)
    cw, ccw = grid.index_of(cfg.q_center), grid.index_of(-cfg.q_center)
    omega = _omega_grid(cfg, gamma)
    resp = solve_chi_modes(
        grid, opto, damping, disorder, omega, cfg.n_realizations, [cw, ccw], couplings,
        phase_match=cfg.phase_match, n_blocks=1, workers=cfg.workers,
    )
    chi = resp.mean
    estimates, predictions = [], []
    for k, go in enumerate(gopt):
        pair = tuple(
            _estimate(cfg.linewidth_method, omega, chi[k, :, m], grid.frequencies[idx], grid.wavevectors[idx], gamma, resp.n_excluded)
            for m, idx in enumerate((cw, ccw))
        )
        estimates.append(pair)
        predictions.append(gamma_pair(MinimalParams(gamma, go, g)))
    return Fig2Result(cfg, grid, omega, gamma, g, gopt, {"cw": cw, "ccw": ccw}, chi, estimates, predictions, resp.n_excluded)


@dataclass
class SweepSeries:
    """Power sweep for one value of ``rho * gamma``."""

    gamma: float
    rho_gamma: float
    strength: float
    grid: ModeGrid
    mode: int
    omega: np.ndarray
    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray
    y_theory: np.ndarray
    y_born: np.ndarray
    y_fwhm: np.ndarray
    damping_hat: np.ndarray
    fwhm: list  # LinewidthEstimate or None per x
    chi: np.ndarray  # (n_x, n_omega)
    fit: SaturatingFit | None
    fit_error: str | None = None
    n_excluded: int = 0

    @property
    def plateau_theory(self) -> float:
        return 1.0 - 1.0 / (2 * np.pi * self.rho_gamma)


@dataclass
class SweepResult:
    config: ScenarioConfig
    series: list = field(default_factory=list)


def run_sweep_series(cfg: ScenarioConfig, gamma: float) -> SweepSeries:
    grid = centered_grid(cfg.q_center, cfg.mode_spacing, cfg.sound_speed, cfg.band_width_gammas * gamma / cfg.sound_speed)
    rho = grid.density_of_states
    strength = cfg.disorder_strength
    if strength is None:
        # disorder broadening 4 pi rho U^2 as a fraction of gamma
        strength = float(np.sqrt(cfg.disorder_broadening * gamma / (4 * np.pi * rho)))
    disorder = DisorderConfig(strength, cfg.seed)
    damping = PhononDamping(gamma)
    opto = _opto(cfg, gamma)
    x = np.array(sorted(cfg.pump_x), dtype=float)
    couplings = coupling_for_power(x, cfg.q_center, gamma, opto.kappa)
    mode = grid.index_of(-cfg.q_center)
    omega = _omega_grid(cfg, gamma)
    omega_q = grid.frequencies[mode]
    log.info("rho*gamma=%.3g: %d modes, U=%.3g, %d realizations", rho * gamma, grid.size, strength, cfg.n_realizations)
    if cfg.dump_disorder:
        out = _ensure_dir(cfg.output_dir)
        write_matrix_csv(DisorderSampler(grid, disorder).sample(0), out / f"disorder_rg{rho * gamma:g}_0.csv")

    resp = solve_chi_modes(
        grid, opto, damping, disorder, omega, cfg.n_realizations, [mode], couplings,
        phase_match=cfg.phase_match, n_blocks=cfg.n_blocks, workers=cfg.workers,
    )
    chi = resp.mean[:, :, 0]
    i0 = int(np.flatnonzero(x == 0)[0])

    def widths(chi_x):
        return np.array([
            _estimate(cfg.linewidth_method, omega, chi_x[k], omega_q, grid.wavevectors[mode], gamma).width
            for k in range(x.size)
        ])

    damping_hat = widths(chi)
    y = np.array([normalized_diffusion(d, damping_hat[i0], gamma, cfg.convention) for d in damping_hat])
    blocks = resp.block_means[:, :, :, 0]
    if resp.n_blocks > 1:
        yb = np.array([
            [normalized_diffusion(d, w[i0], gamma, cfg.convention) for d in w]
            for w in (widths(b) for b in blocks)
        ])
        sigma = yb.std(axis=0, ddof=1) / np.sqrt(resp.n_blocks)
    else:
        sigma = np.zeros_like(y)

    fwhm, y_fwhm = [], []
    for k in range(x.size):
        try:
            fwhm.append(fit_lorentzian(omega, chi[k], mode_q=grid.wavevectors[mode], n_excluded=resp.n_excluded))
        except (FitError, RangeError):
            fwhm.append(None)
    if fwhm[i0] is not None:
        base = fwhm[i0].width
        y_fwhm = [normalized_diffusion(e.width, base, gamma, cfg.convention) if e else np.nan for e in fwhm]
    else:
        y_fwhm = [np.nan] * x.size

    y_born = np.array([
        born_diffusion_ratio(grid, opto.with_coupling(c), damping, omega_q, mode, cfg.phase_match) if c > 0 else 1.0
        for c in couplings
    ])
    fit, fit_error = None, None
    try:
        fit = fit_saturating(x, y, sigma, rho_gamma=rho * gamma)
    except FitError as exc:
        fit_error = str(exc)
        log.warning("rho*gamma=%.3g: %s", rho * gamma, exc)
    return SweepSeries(
        gamma, rho * gamma, strength, grid, mode, omega, x, y, sigma,
        diffusion_ratio(x, rho, gamma), y_born, np.array(y_fwhm, dtype=float), damping_hat,
        fwhm, chi, fit, fit_error, resp.n_excluded,
    )


def run_fig4(cfg: ScenarioConfig) -> SweepResult:
    """Normalized diffusion of the CCW center mode versus pump power."""
    check_regime(cfg)
    result = SweepResult(cfg)
    for gamma in cfg.gammas:
        result.series.append(run_sweep_series(cfg, gamma))
    return result


def _ensure_dir(path):
    from pathlib import Path

    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
