"""Weighted least squares for the saturating suppression curve
``y = 1 - a x / (1 + b x)``."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from ..ensemble import FitError


@dataclass(frozen=True)
class SaturatingFit:
    a: float
    b: float
    covariance: np.ndarray
    residual: float  # weighted RMS misfit
    degenerate: bool = False


def saturating(x, a, b):
    x = np.asarray(x, dtype=float)
    return 1.0 - a * x / (1.0 + b * x)


def _initial_guess(x, y, rho_gamma):
    if rho_gamma is not None:
        return 0.5, np.pi * rho_gamma
    # slope from the smallest positive x, asymptote from the largest
    pos = np.flatnonzero(x > 0)
    lo, hi = pos[np.argmin(x[pos])], pos[np.argmax(x[pos])]
    a0 = max((1.0 - y[lo]) / x[lo], 1e-12)
    drop = max(1.0 - y[hi], 1e-12)
    return a0, max(a0 / drop, 1e-12)


def fit_saturating(x, y, sigma=None, rho_gamma: float | None = None, max_nfev: int = 5000) -> SaturatingFit:
    """Fit ``1 - a x / (1 + b x)``.

    Points with zero ``sigma`` (the x = 0 anchor, which every member of the
    family passes through) get the smallest positive uncertainty.  If the
    data show no suppression at all, returns ``a = 0`` with ``b = nan`` and
    ``degenerate=True``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.unique(x).size < 4:
        raise ValueError("need at least 4 distinct x values")
    if sigma is None:
        sigma = np.ones_like(y)
    sigma = np.asarray(sigma, dtype=float)
    positive = sigma[sigma > 0]
    floor = positive.min() if positive.size else 1.0
    sigma = np.where(sigma > 0, sigma, floor)

    if np.max(np.abs(1.0 - y)) <= 1e-12:
        return SaturatingFit(0.0, np.nan, np.full((2, 2), np.nan), 0.0, degenerate=True)

    p0 = _initial_guess(x, y, rho_gamma)
    with warnings.catch_warnings():
        warnings.simplefilter("error", OptimizeWarning)
        try:
            popt, pcov = curve_fit(
                saturating, x, y, p0=p0, sigma=sigma, absolute_sigma=True,
                bounds=([-np.inf, 0.0], [np.inf, np.inf]), max_nfev=max_nfev,
            )
        except (RuntimeError, OptimizeWarning, ValueError) as exc:
            raise FitError(f"saturating fit failed: {exc}", trace=(x, y, sigma)) from exc
    resid = float(np.sqrt(np.mean(((saturating(x, *popt) - y) / sigma) ** 2)))
    if not np.all(np.isfinite(popt)):
        raise FitError("non-finite fit parameters", trace=(x, y, sigma))
    return SaturatingFit(float(popt[0]), float(popt[1]), pcov, resid)
