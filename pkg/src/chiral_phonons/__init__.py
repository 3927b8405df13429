"""Optomechanically induced chiral phonon transport in a disordered 1-D ring."""
from .diagrammatics import (
    RankOneData,
    diffusion_ratio,
    kappa_tilde,
    rank_one,
    resum_GM,
    scalar_g,
    sigma_D,
    sigma_P,
)
from .disorder import DisorderConfig, DisorderRealization, DisorderSampler, covariance_check, sample_E
from .ensemble import (
    LinewidthEstimate,
    ModeResponse,
    ResponseMatrix,
    extract_linewidth,
    fit_lorentzian,
    normalized_diffusion,
    resonant_damping,
    solve_chi,
    solve_chi_modes,
)
from .model import (
    MaterialConstants,
    ModeGrid,
    OptoParams,
    ParameterError,
    PhononDamping,
    build_mode_grid,
    centered_grid,
    coupling_from_material,
    coupling_vector,
    lorentzian_weight,
    matrix_D,
    matrix_M,
    phase_match_f,
)
from .single_mode import MinimalParams, gamma_opt, gamma_pair

__version__ = "0.1.0"
