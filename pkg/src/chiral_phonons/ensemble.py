"""Brute-force disorder-averaged susceptibility.

Two solvers are provided:

``solve_chi``
    averages the full matrix ``(D - M - E_i)^-1`` by direct inversion at
    every frequency; intended for small grids and as the reference path.

``solve_chi_modes``
    returns only selected diagonal elements, for many pump strengths at
    once.  Per realization it diagonalizes the Hermitian part
    ``diag(Omega) - E`` once; the optical term is rank one, so every
    ``(omega, c_cl)`` pair then costs O(n) via the Sherman-Morrison
    formula.  The result is still the exact inverse.

Both reduce realization results in index order (fixed-size chunks, summed
in chunk order), so output does not depend on ``workers``.
"""
from __future__ import annotations

import csv
import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .disorder import DisorderConfig, DisorderSampler
from .model import ModeGrid, OptoParams, PhononDamping, coupling_vector, optical_denominator

log = logging.getLogger(__name__)

MAX_EXCLUDED_FRACTION = 0.01
COND_LIMIT = 1e12
CHUNK = 16
MIN_POINTS_ACROSS = 16


class SolverError(RuntimeError):
    """Too many near-singular samples were excluded."""


class FitError(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class RangeError(ValueError):
    """Resonance not resolved by the frequency grid."""


class DegenerateBaselineError(ZeroDivisionError):
    pass


@dataclass
class ResponseMatrix:
    omega: np.ndarray
    chi: np.ndarray  # (n_omega, n, n)
    grid: ModeGrid
    n_realizations: int
    seed: int | None
    n_excluded: int = 0
    params_hash: str = ""

    def diagonal(self, index: int) -> np.ndarray:
        return self.chi[:, index, index]


@dataclass
class ModeResponse:
    """Ensemble-averaged diagonal elements for a set of modes and pump strengths.

    ``block_sums[b, c, w, m]`` holds the sum over realizations of block
    ``b`` at coupling ``coupling_speeds[c]``, frequency ``omega[w]`` and
    mode ``modes[m]``; ``block_counts[b, c, w]`` the number of samples that
    entered it.
    """

    omega: np.ndarray
    modes: np.ndarray
    coupling_speeds: np.ndarray
    block_sums: np.ndarray
    block_counts: np.ndarray
    grid: ModeGrid
    n_realizations: int
    seed: int | None
    n_excluded: int = 0

    @property
    def mean(self) -> np.ndarray:
        return self.block_sums.sum(axis=0) / self.block_counts.sum(axis=0)[..., None]

    @property
    def block_means(self) -> np.ndarray:
        return self.block_sums / self.block_counts[..., None]

    @property
    def n_blocks(self) -> int:
        return self.block_sums.shape[0]


@dataclass(frozen=True)
class LinewidthEstimate:
    mode_q: float
    center: float
    width: float
    residual: float
    method: str
    n_excluded: int = 0


def _resolve_disorder(grid, disorder):
    """Returns ``(matrix_for(index), seed, is_random)``."""
    if disorder is None:
        zero = np.zeros((grid.size,) * 2, dtype=complex)
        return (lambda i: zero), None, False
    if isinstance(disorder, DisorderConfig):
        if disorder.strength == 0:
            zero = np.zeros((grid.size,) * 2, dtype=complex)
            return (lambda i: zero), disorder.seed, False
        sampler = DisorderSampler(grid, disorder)
        return sampler.matrix, disorder.seed, True
    fixed = np.asarray(disorder, dtype=complex)
    if fixed.shape != (grid.size, grid.size):
        raise ValueError("deterministic coupling matrix must match the grid size")
    return (lambda i: fixed), None, False


def _map_chunks(func, n_realizations, workers):
    chunks = [range(s, min(s + CHUNK, n_realizations)) for s in range(0, n_realizations, CHUNK)]
    if workers <= 1:
        return [func(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, keeping the reduction deterministic
        return list(pool.map(func, chunks))


def solve_chi(
    grid: ModeGrid,
    opto: OptoParams,
    damping: PhononDamping,
    disorder,
    omega,
    n_realizations: int = 1,
    *,
    phase_match: str = "eq13",
    workers: int = 1,
    cond_limit: float = COND_LIMIT,
) -> ResponseMatrix:
    """Average ``(D(omega) - M(omega) - E_i)^-1`` over realizations.

    ``disorder`` is a :class:`DisorderConfig`, a fixed coupling matrix, or
    ``None``.  Samples whose 1-norm condition number exceeds ``cond_limit``
    are dropped; more than 1% dropped raises :class:`SolverError`.
    """
    if n_realizations < 1:
        raise ValueError("n_realizations must be >= 1")
    omega = np.asarray(omega, dtype=float)
    matrix_for, seed, is_random = _resolve_disorder(grid, disorder)
    if not is_random:
        n_realizations = 1

    u = coupling_vector(grid, opto, phase_match)
    M = np.outer(u, u.conj())[None] / optical_denominator(opto, omega)[:, None, None]
    n = grid.size
    diag = grid.frequencies[None, :] - omega[:, None] - 0.5j * damping.gamma
    base = -M
    base[:, np.arange(n), np.arange(n)] += diag

    def run(chunk):
        total = np.zeros_like(base)
        counts = np.zeros(omega.size, dtype=np.int64)
        for i in chunk:
            A = base - matrix_for(i)[None]
            inv = np.linalg.inv(A)
            cond = np.linalg.norm(A, 1, axis=(1, 2)) * np.linalg.norm(inv, 1, axis=(1, 2))
            ok = np.isfinite(cond) & (cond < cond_limit)
            total[ok] += inv[ok]
            counts += ok
        return total, counts

    parts = _map_chunks(run, n_realizations, workers)
    total = sum(p[0] for p in parts)
    counts = sum(p[1] for p in parts)
    n_excluded = int(n_realizations * omega.size - counts.sum())
    _check_exclusions(n_excluded, n_realizations * omega.size)
    return ResponseMatrix(omega, total / counts[:, None, None], grid, n_realizations, seed, n_excluded)


def _check_exclusions(n_excluded, n_total):
    if n_excluded:
        log.warning("excluded %d of %d near-singular samples", n_excluded, n_total)
    if n_excluded > MAX_EXCLUDED_FRACTION * n_total:
        raise SolverError(f"{n_excluded}/{n_total} samples near-singular (> 1%)")


def _spectral_diagonal(H0, u0, modes, z, mu, c2, cond_limit):
    lam, V = np.linalg.eigh(H0)
    R = 1.0 / (lam[None, :] - z[:, None])  # (n_omega, n)
    Vq = V[modes]  # (n_modes, n)
    b = V.conj().T @ u0
    vb = Vq * b[None, :]
    S1 = R @ (np.abs(Vq) ** 2).T
    S2 = R @ vb.T
    S3 = R @ vb.conj().T
    S4 = R @ (np.abs(b) ** 2)
    k = c2[:, None] * mu[None, :]  # (n_c, n_omega)
    denom = 1.0 - k * S4[None, :]
    ok = np.abs(denom) > 1.0 / cond_limit
    safe = np.where(ok, denom, 1.0)
    chi = S1[None] + (k / safe)[..., None] * (S2 * S3)[None]
    return chi, ok


def solve_chi_modes(
    grid: ModeGrid,
    opto: OptoParams,
    damping: PhononDamping,
    disorder,
    omega,
    n_realizations: int,
    modes,
    coupling_speeds,
    *,
    phase_match: str = "eq13",
    n_blocks: int = 1,
    workers: int = 1,
    cond_limit: float = COND_LIMIT,
) -> ModeResponse:
    """Ensemble-averaged ``chi_qq(omega)`` for ``modes`` at each coupling speed.

    The same disorder realizations are used for every coupling speed, so
    differences between pump strengths carry correlated, not independent,
    Monte-Carlo noise.
    """
    omega = np.asarray(omega, dtype=float)
    modes = np.atleast_1d(np.asarray(modes, dtype=int))
    cs = np.atleast_1d(np.asarray(coupling_speeds, dtype=float))
    matrix_for, seed, is_random = _resolve_disorder(grid, disorder)
    if not is_random:
        n_realizations = n_blocks = 1
    if n_realizations < n_blocks or n_blocks < 1:
        raise ValueError("need 1 <= n_blocks <= n_realizations")
    block_of = np.arange(n_realizations) * n_blocks // n_realizations

    u0 = coupling_vector(grid, opto.with_coupling(1.0), phase_match)
    z = omega + 0.5j * damping.gamma
    mu = 1.0 / optical_denominator(opto, omega)
    c2 = cs**2
    H_bare = np.diag(grid.frequencies).astype(complex)

    shape = (n_blocks, cs.size, omega.size)

    def run(chunk):
        sums = np.zeros(shape + (modes.size,), dtype=complex)
        counts = np.zeros(shape, dtype=np.int64)
        for i in chunk:
            chi, ok = _spectral_diagonal(H_bare - matrix_for(i), u0, modes, z, mu, c2, cond_limit)
            b = block_of[i]
            sums[b] += np.where(ok[..., None], chi, 0.0)
            counts[b] += ok
        return sums, counts

    parts = _map_chunks(run, n_realizations, workers)
    sums = sum(p[0] for p in parts)
    counts = sum(p[1] for p in parts)
    n_total = n_realizations * cs.size * omega.size
    n_excluded = int(n_total - counts.sum())
    _check_exclusions(n_excluded, n_total)
    return ModeResponse(omega, modes, cs, sums, counts, grid, n_realizations, seed, n_excluded)


def lorentzian_abs2(omega, amplitude, center, width):
    return amplitude / ((omega - center) ** 2 + 0.25 * width**2)


def fit_lorentzian(omega, chi_qq, *, min_points: int = MIN_POINTS_ACROSS, mode_q: float = np.nan, n_excluded: int = 0):
    """Least-squares fit of ``|chi_qq|^2`` to ``A / ((w - w0)^2 + width^2 / 4)``.

    Returns a :class:`LinewidthEstimate` whose ``width`` is the full width
    at half maximum and whose ``residual`` is the RMS misfit relative to the
    peak value.
    """
    omega = np.asarray(omega, dtype=float)
    y = np.abs(np.asarray(chi_qq)) ** 2
    ipk = int(np.argmax(y))
    if ipk == 0 or ipk == y.size - 1:
        raise RangeError("resonance peak lies at the edge of the frequency grid")
    above = np.flatnonzero(y >= 0.5 * y[ipk])
    width0 = max(omega[above[-1]] - omega[above[0]], omega[1] - omega[0])
    p0 = [y[ipk] * width0**2 / 4, omega[ipk], width0]
    scale = y[ipk]
    with warnings.catch_warnings():
        warnings.simplefilter("error", OptimizeWarning)
        try:
            popt, _ = curve_fit(
                lambda w, a, c, g: lorentzian_abs2(w, a, c, g) / scale,
                omega,
                y / scale,
                p0=p0,
                maxfev=2000,
            )
        except (RuntimeError, OptimizeWarning) as exc:
            raise FitError(f"Lorentzian fit did not converge: {exc}", trace=(omega, y)) from exc
    amplitude, center, width = popt
    width = abs(width)
    if not (omega[0] < center < omega[-1]):
        raise RangeError("fitted center outside the frequency grid")
    inside = np.count_nonzero(np.abs(omega - center) <= 0.5 * width)
    if inside < min_points:
        raise RangeError(f"only {inside} grid points across the fitted width (need {min_points})")
    resid = float(np.sqrt(np.mean((lorentzian_abs2(omega, amplitude, center, width) - y) ** 2)) / scale)
    return LinewidthEstimate(float(mode_q), float(center), float(width), resid, "lorentzian-fit", n_excluded)


def extract_linewidth(resp: ResponseMatrix, q: float, **kwargs) -> LinewidthEstimate:
    idx = resp.grid.index_of(q)
    return fit_lorentzian(
        resp.omega,
        resp.diagonal(idx),
        mode_q=resp.grid.wavevectors[idx],
        n_excluded=resp.n_excluded,
        **kwargs,
    )


def resonant_damping(omega, chi_qq, omega_q: float) -> float:
    """``-2 Im[1 / chi_qq]`` at the bare mode frequency.

    This is the damping rate seen by the mode at resonance, intrinsic part
    plus ``-2 Im`` of the diagonal self-energy; unlike the Lorentzian width
    it is insensitive to a frequency-dependent real self-energy.
    """
    inv = 1.0 / np.asarray(chi_qq)
    omega = np.asarray(omega, dtype=float)
    if not omega[0] <= omega_q <= omega[-1]:
        raise RangeError("mode frequency outside the frequency grid")
    val = np.interp(omega_q, omega, inv.real) + 1j * np.interp(omega_q, omega, inv.imag)
    return float(-2.0 * val.imag)


def normalized_diffusion(gamma_on: float, gamma_off: float, gamma_intrinsic: float, convention: str = "subtracted") -> float:
    """Pumped over unpumped linewidth, optionally with ``gamma_intrinsic`` removed."""
    if convention == "subtracted":
        num, den = gamma_on - gamma_intrinsic, gamma_off - gamma_intrinsic
    elif convention == "raw":
        num, den = gamma_on, gamma_off
    else:
        raise ValueError(f"unknown convention {convention!r}")
    if abs(den) <= 1e-12 * max(abs(gamma_off), abs(gamma_intrinsic), 1e-300):
        raise DegenerateBaselineError("pump-off baseline is indistinguishable from zero")
    return num / den


def write_response_csv(path, omega, chi, mode_q) -> Path:
    """Columns: omega, mode_q, re_chi, im_chi, abs2_chi.

    ``chi`` has shape ``(n_omega, n_modes)`` matching ``mode_q``.
    """
    path = Path(path)
    chi = np.asarray(chi).reshape(len(omega), -1)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["omega", "mode_q", "re_chi", "im_chi", "abs2_chi"])
        for m, q in enumerate(np.atleast_1d(mode_q)):
            for k, om in enumerate(omega):
                c = chi[k, m]
                w.writerow([repr(float(om)), repr(float(q)), repr(float(c.real)), repr(float(c.imag)), repr(float(abs(c) ** 2))])
    return path


def write_linewidths_csv(path, estimates, x=None) -> Path:
    """Columns: mode_q, omega_hat, gamma_hat, residual, n_excluded.

    With ``x`` given, a leading pump-power column is added and rows whose
    estimate is ``None`` (failed fit) are skipped.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        head = ["mode_q", "omega_hat", "gamma_hat", "residual", "n_excluded"]
        w.writerow(head if x is None else ["x"] + head)
        keys = [None] * len(estimates) if x is None else list(x)
        for key, e in zip(keys, estimates):
            if e is None:
                continue
            row = [repr(e.mode_q), repr(e.center), repr(e.width), repr(e.residual), e.n_excluded]
            w.writerow(row if key is None else [repr(float(key))] + row)
    return path
