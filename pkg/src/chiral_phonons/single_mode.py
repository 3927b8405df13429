"""Minimal two-mode theory: one phase-matched CW mode, its CCW partner,
and a fixed intermode scattering rate ``g``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModeGrid


@dataclass(frozen=True)
class MinimalParams:
    gamma_in: float
    gamma_opt: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        if not self.gamma_in > 0:
            raise ValueError("gamma_in must be positive")
        if self.gamma_opt < 0 or self.g < 0:
            raise ValueError("gamma_opt and g must be non-negative")


def gamma_opt(alpha: float, kappa: float) -> float:
    """Optomechanical damping ``4 alpha^2 / kappa`` in the sideband-resolved regime."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return 4.0 * alpha**2 / kappa


def gamma_pair(p: MinimalParams) -> tuple[float, float]:
    """Approximate (CW, CCW) damping rates near resonance."""
    plus = p.gamma_in + p.gamma_opt + 4 * p.g**2 / p.gamma_in
    minus = p.gamma_in + 4 * p.g**2 / (p.gamma_in + p.gamma_opt)
    return plus, minus


def pair_coupling_matrix(grid: ModeGrid, g: float) -> np.ndarray:
    """Deterministic scattering matrix coupling every mode to its partner at ``-q``."""
    n = grid.size
    E = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    E[idx, idx[::-1]] = g
    return E
