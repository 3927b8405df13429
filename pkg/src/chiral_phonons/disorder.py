"""Random density-fluctuation disorder and its scattering matrix.

Each realization draws one complex Gaussian Fourier component ``z_m`` per
momentum transfer ``m = q - q' != 0`` with ``z_{-m} = conj(z_m)`` and
``<|z_m|^2> = 1``, ``<z_m z_m> = 0``.  Setting ``E_{qq'} = U z_{q-q'}`` gives
a Hermitian matrix with zero diagonal and

    <E_{q1 q2} E_{q3 q4}> = U^2 delta(q1 + q3, q2 + q4)

for off-diagonal entries.

Substreams: realization ``i`` of a run seeded with ``seed`` uses
``numpy.random.SeedSequence(seed, spawn_key=(i,))``, so any subset of
realizations can be regenerated independently and in any order.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import ModeGrid

# momentum transfers equal to within this fraction of the spacing share a component
_KEY_RESOLUTION = 1e-6


class StatisticsError(ValueError):
    pass


@dataclass(frozen=True)
class DisorderConfig:
    """RMS off-diagonal coupling ``strength`` and the ensemble seed.

    When ``rho0`` is given, entries carry the extra physical factor
    ``sqrt(Omega_q Omega_q') / (2 rho0)``; acceptance runs leave it unset.
    """

    strength: float
    seed: int = 0
    rho0: float | None = None

    def __post_init__(self):
        if self.strength < 0:
            raise ValueError("disorder strength must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class DisorderRealization:
    matrix: np.ndarray
    seed: int
    index: int


def realization_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass
class DisorderSampler:
    """Precomputes the momentum-transfer bookkeeping for one grid."""

    grid: ModeGrid
    config: DisorderConfig
    _inverse: np.ndarray = field(init=False, repr=False)
    _keys: np.ndarray = field(init=False, repr=False)
    _mirror: np.ndarray = field(init=False, repr=False)
    _scale: np.ndarray | float = field(init=False, repr=False)

    def __post_init__(self):
        q = self.grid.wavevectors
        diff = (q[:, None] - q[None, :]) / (self.grid.spacing * _KEY_RESOLUTION)
        keys = np.rint(diff).astype(np.int64)
        self._keys, inverse = np.unique(keys, return_inverse=True)
        self._inverse = inverse.reshape(keys.shape)
        # differences are antisymmetric, so -key is always present
        self._mirror = np.searchsorted(self._keys, -self._keys)
        self._positive = np.flatnonzero(self._keys > 0)
        if self.config.rho0 is None:
            self._scale = self.config.strength
        else:
            om = self.grid.frequencies
            self._scale = self.config.strength * np.sqrt(np.outer(om, om)) / (2 * self.config.rho0)

    @property
    def n_components(self) -> int:
        return self._positive.size

    def components(self, index: int) -> np.ndarray:
        """Fourier amplitudes for every distinct transfer (zero at m = 0)."""
        rng = realization_rng(self.config.seed, index)
        n = self._positive.size
        draw = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        z = np.zeros(self._keys.size, dtype=complex)
        z[self._positive] = draw
        negative = self._keys < 0
        z[negative] = np.conj(z[self._mirror[negative]])
        return z

    def matrix(self, index: int) -> np.ndarray:
        if self.config.strength == 0:
            return np.zeros((self.grid.size,) * 2, dtype=complex)
        return self._scale * self.components(index)[self._inverse]

    def sample(self, index: int) -> DisorderRealization:
        return DisorderRealization(self.matrix(index), self.config.seed, index)


def sample_E(grid: ModeGrid, cfg: DisorderConfig, realization_index: int) -> DisorderRealization:
    return DisorderSampler(grid, cfg).sample(realization_index)


@dataclass(frozen=True)
class CovarianceEntry:
    indices: tuple[int, int, int, int]
    expected: float
    mean: complex
    stderr_real: float
    stderr_imag: float

    @property
    def deviation(self) -> float:
        return abs(self.mean - self.expected)

    @property
    def z_score(self) -> float:
        """Largest deviation of the real or imaginary part, in standard errors."""
        z = 0.0
        for dev, se in ((self.mean.real - self.expected, self.stderr_real), (self.mean.imag, self.stderr_imag)):
            if se > 0:
                z = max(z, abs(dev) / se)
            elif abs(dev) > 0:
                return np.inf
        return z


@dataclass(frozen=True)
class CovarianceReport:
    entries: list[CovarianceEntry]
    n_samples: int
    strength: float

    @property
    def max_deviation(self) -> float:
        return max(e.deviation for e in self.entries)

    @property
    def max_z(self) -> float:
        return max(e.z_score for e in self.entries)

    def within(self, n_sigma: float = 5.0) -> bool:
        return self.max_z <= n_sigma


def _quadruples(grid: ModeGrid, rng: np.random.Generator, n_quadruples: int):
    """Mix of index quadruples: momentum-conserving, pairings, and generic."""
    n = grid.size
    q = grid.wavevectors
    tol = grid.spacing * _KEY_RESOLUTION
    out = []
    attempts = 0
    while len(out) < n_quadruples and attempts < 100 * n_quadruples:
        attempts += 1
        i1, i2, i3 = rng.integers(n, size=3)
        kind = len(out) % 3
        if kind == 0:
            i4 = int(np.argmin(np.abs(q - (q[i1] + q[i3] - q[i2]))))
            if abs(q[i4] - (q[i1] + q[i3] - q[i2])) > tol:
                continue
        elif kind == 1:
            i3, i4 = i2, i1
        else:
            i4 = rng.integers(n)
        quad = (int(i1), int(i2), int(i3), int(i4))
        # covariance identity is stated for off-diagonal entries only
        if quad[0] == quad[1] or quad[2] == quad[3]:
            continue
        out.append(quad)
    return out


def covariance_check(
    samples,
    strength: float,
    grid: ModeGrid,
    n_quadruples: int = 60,
    seed: int = 0,
) -> CovarianceReport:
    """Compare empirical ``<E_{q1q2} E_{q3q4}>`` with ``U^2 delta(q1+q3, q2+q4)``."""
    mats = np.stack([s.matrix if isinstance(s, DisorderRealization) else np.asarray(s) for s in samples])
    n_samples = mats.shape[0]
    if n_samples < 100:
        raise StatisticsError(f"need at least 100 samples, got {n_samples}")
    q = grid.wavevectors
    tol = grid.spacing * _KEY_RESOLUTION
    entries = []
    for i1, i2, i3, i4 in _quadruples(grid, np.random.default_rng(seed), n_quadruples):
        prod = mats[:, i1, i2] * mats[:, i3, i4]
        conserving = abs(q[i1] + q[i3] - q[i2] - q[i4]) <= tol
        entries.append(
            CovarianceEntry(
                (i1, i2, i3, i4),
                strength**2 if conserving else 0.0,
                complex(prod.mean()),
                float(prod.real.std(ddof=1) / np.sqrt(n_samples)),
                float(prod.imag.std(ddof=1) / np.sqrt(n_samples)),
            )
        )
    return CovarianceReport(entries, n_samples, strength)


def write_matrix_csv(realization: DisorderRealization, path) -> Path:
    """Debug dump: one row per entry (row, column, real, imaginary)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "column", "real", "imag"])
        for (r, c), val in np.ndenumerate(realization.matrix):
            writer.writerow([r, c, repr(float(val.real)), repr(float(val.imag))])
    return path
