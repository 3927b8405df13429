import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from chiral_phonons import OptoParams, PhononDamping, build_mode_grid, centered_grid, solve_chi
from chiral_phonons.diagrammatics import (
    PoleError,
    UndefinedError,
    W0,
    W0_lorentzian,
    born_diffusion_ratio,
    coupling_for_power,
    diffusion_ratio,
    eta,
    g_lorentzian,
    kappa_tilde,
    norm2_lorentzian,
    pump_power,
    rank_one,
    resum_GM,
    scalar_g,
    sigma_D,
    sigma_P,
    write_predictions_csv,
)
from chiral_phonons.model import matrix_D, matrix_M

GAMMA = 1e-3


def _random_instance(rng, n):
    d = rng.normal(size=n) + 1j * rng.uniform(-2.0, -0.1, size=n)
    phi = rng.normal(size=n) + 1j * rng.normal(size=n)
    phi /= np.linalg.norm(phi)
    lam = complex(rng.normal(), rng.normal())
    return d, phi, lam


@settings(max_examples=60, deadline=None)
@given(n=st.integers(4, 200), seed=st.integers(0, 2**32 - 1))
def test_resummation_equals_direct_inverse(n, seed):
    d, phi, lam = _random_instance(np.random.default_rng(seed), n)
    P = np.outer(phi, phi.conj())
    direct = np.linalg.inv(np.diag(d) - lam * P)
    got = resum_GM(d, lam, P)
    assert np.max(np.abs(got - direct)) <= 1e-10 * np.max(np.abs(direct))


def test_resummation_two_by_two_by_hand():
    d = np.array([1.0 - 1j, 2.0 - 0.5j])
    phi = np.array([1.0, 1.0]) / np.sqrt(2)
    lam = 0.3 + 0.1j
    A = np.array([[d[0] - lam / 2, -lam / 2], [-lam / 2, d[1] - lam / 2]])
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    hand = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]]) / det
    np.testing.assert_allclose(resum_GM(np.diag(d), lam, np.outer(phi, phi)), hand, rtol=1e-13)


def test_resummation_zero_lambda_and_pole():
    d = np.array([1.0 - 0.1j, -0.5 - 0.2j])
    P = np.outer([1, 0], [1, 0]).astype(complex)
    np.testing.assert_array_equal(resum_GM(d, 0, P), np.diag(1 / d))
    with pytest.raises(PoleError):
        resum_GM(d, 1.0 / (1.0 / d[0]), P)


def test_resummation_matches_ensemble_solver_without_disorder(opto, damping):
    grid = build_mode_grid(6, 3e-4, 1.0, 1.0 - 1e-3)
    for w in (0.998, 1.0, 1.0013):
        data = rank_one(grid, opto, damping, w)
        resummed = resum_GM(matrix_D(grid, damping, w), data.lam, data.projector)
        solved = solve_chi(grid, opto, damping, None, [w]).chi[0]
        np.testing.assert_allclose(resummed, solved, rtol=1e-10, atol=1e-10 * np.abs(solved).max())


def test_projector_properties(opto, damping):
    grid = build_mode_grid(8, 3e-4, 1.0, 1.0 - 1e-3)
    data = rank_one(grid, opto, damping, 1.0002)
    P = data.projector
    np.testing.assert_allclose(P @ P, P, atol=1e-14)
    assert np.trace(P).real == pytest.approx(1.0)
    Dinv = np.diag(1 / np.diag(matrix_D(grid, damping, 1.0002)))
    np.testing.assert_allclose(P @ Dinv @ P, data.g * P, rtol=1e-10, atol=1e-12 * abs(data.g))
    np.testing.assert_allclose(data.lam * P, matrix_M(grid, opto, 1.0002), rtol=1e-10, atol=1e-15)


def test_undefined_without_optical_coupling(damping):
    grid = build_mode_grid(2, 0.01, 1.0, 1.0)
    off = OptoParams(-1.0, 0.05, 0.0, 1.0, phonon_width=5e-4)
    with pytest.raises(UndefinedError):
        rank_one(grid, off, damping, 1.0).phi
    with pytest.raises(UndefinedError):
        scalar_g(grid, off, damping, 1.0)


def _lorentz_integrals(omega, omega_c, gamma):
    """Continuum <phi|D^-1|phi> and -<phi|D^-2|phi> by quadrature."""
    a = gamma / 2
    weight = lambda x: a**2 / ((x - omega_c) ** 2 + a**2)
    lim = (omega_c - 2000 * gamma, omega_c + 2000 * gamma)
    norm = quad(weight, *lim, points=[omega_c], limit=400)[0]

    def part(fn):
        re = quad(lambda x: (weight(x) * fn(x)).real, *lim, points=[omega_c, omega], limit=400)[0]
        im = quad(lambda x: (weight(x) * fn(x)).imag, *lim, points=[omega_c, omega], limit=400)[0]
        return complex(re, im) / norm

    g = part(lambda x: 1 / (x - omega - 1j * a))
    w0 = -part(lambda x: 1 / (x - omega - 1j * a) ** 2)
    return g, w0


def test_lorentzian_closed_forms_against_quadrature():
    gamma, omega_c = 1e-3, 1.0
    g, w0 = _lorentz_integrals(omega_c, omega_c, gamma)
    assert g == pytest.approx(g_lorentzian(omega_c, omega_c, gamma), rel=5e-3)
    assert w0 == pytest.approx(W0_lorentzian(omega_c, omega_c, gamma), rel=5e-3)


@pytest.mark.parametrize("detune", [0.0, 0.3, -1.0, 2.5])
def test_closed_form_g_is_the_pole_approximation(dense_setup, detune):
    """Away from resonance the closed form keeps only the pole of the phase-matched branch."""
    grid, opto, damping = dense_setup
    omega = 1.0 + detune * GAMMA
    pole = scalar_g(grid, opto, damping, omega, "resonance-approx", "lorentzian")
    scale = norm2_lorentzian(opto.coupling_speed, 1.0, grid.density_of_states, GAMMA)
    n2 = rank_one(grid, opto, damping, omega, "lorentzian").norm2
    assert pole * n2 / scale == pytest.approx(g_lorentzian(omega, 1.0, GAMMA), rel=1e-9)


@pytest.mark.parametrize("detune", [0.0, 0.3, -1.0, 2.5])
def test_exact_sums_match_continuum_quadrature(dense_setup, detune):
    grid, opto, damping = dense_setup
    omega = 1.0 + detune * GAMMA
    g_ref, w0_ref = _lorentz_integrals(omega, 1.0, GAMMA)
    g = scalar_g(grid, opto, damping, omega, phase_match="lorentzian")
    w0 = W0(grid, opto, damping, omega, "lorentzian")
    # the finite band drops ~1.6% of the Lorentzian weight
    assert abs(g - g_ref) / abs(g_ref) < 0.03
    assert abs(w0 - w0_ref) / abs(w0_ref) < 0.03


def test_resonance_values():
    assert g_lorentzian(1.0, 1.0, GAMMA) == pytest.approx(1j / GAMMA)
    assert W0_lorentzian(1.0, 1.0, GAMMA) == pytest.approx(1 / GAMMA**2)


def test_scalar_g_dense_grid(dense_setup):
    grid, opto, damping = dense_setup
    g = scalar_g(grid, opto, damping, 1.0, phase_match="lorentzian")
    assert abs(g.real) < 1e-6 * abs(g)
    assert g.imag == pytest.approx(1 / GAMMA, rel=0.03)
    approx = scalar_g(grid, opto, damping, 1.0, "resonance-approx", "lorentzian")
    assert approx.real == 0
    assert abs(approx - g) / abs(g) < 0.10


def test_W0_dense_grid(dense_setup):
    grid, opto, damping = dense_setup
    val = W0(grid, opto, damping, 1.0, "lorentzian")
    assert val.real == pytest.approx(1 / GAMMA**2, rel=0.05)
    assert abs(val.imag) < 1e-6 * abs(val)


def test_norm_and_kappa_tilde(dense_setup):
    grid, opto, damping = dense_setup
    rho = grid.density_of_states
    data = rank_one(grid, opto, damping, 1.0, "lorentzian")
    assert data.norm2 == pytest.approx(norm2_lorentzian(opto.coupling_speed, 1.0, rho, GAMMA), rel=0.03)
    # optical broadening equals -2 Re(i N^2 g) for the Lorentzian closed forms
    n2 = norm2_lorentzian(opto.coupling_speed, 1.0, rho, GAMMA)
    shift = -2 * (1j * n2 * g_lorentzian(1.0, 1.0, GAMMA)).real
    assert kappa_tilde(opto.kappa, rho, opto.coupling_speed, 1.0, 1.0) == pytest.approx(opto.kappa + shift)
    assert data.kappa_shift == pytest.approx(shift, rel=0.05)
    assert kappa_tilde(opto.kappa, rho, 0.0, 1.0, 1.0) == opto.kappa
    assert kappa_tilde(0.1, rho, 0.2, 1.0, 1.0) > kappa_tilde(0.1, rho, 0.1, 1.0, 1.0)


def test_sigma_D_limits():
    grid = build_mode_grid(2, 1.0, 1.0, 1.0)
    damping = PhononDamping(0.5)
    assert sigma_D(grid, damping, 0.0, 1.5) == 0
    # q = -2, -1, 1, 2 so frequencies 2, 1, 1, 2; omega = 1.5 by hand
    expected = 0.25 * (2 / (1 - 1.5 - 0.25j) + 2 / (2 - 1.5 - 0.25j))
    assert sigma_D(grid, damping, 0.5, 1.5) == pytest.approx(expected)
    assert sigma_D(grid, damping, 0.5, 1.5, exclude=0) == pytest.approx(expected - 0.25 / (2 - 1.5 - 0.25j))


def test_sigma_D_continuum():
    gamma = 1e-3
    grid = centered_grid(1.0, 1e-4, 1.0, 20 * gamma)
    assert grid.size >= 200
    U = 1e-5
    exact = sigma_D(grid, PhononDamping(gamma), U, 1.0)
    approx = sigma_D(grid, PhononDamping(gamma), U, 1.0, method="approx")
    assert approx == pytest.approx(2j * np.pi * grid.density_of_states * U**2)
    assert abs(exact - approx) / abs(approx) < 0.10


def test_sigma_P_basics(dense_setup):
    grid, opto, damping = dense_setup
    ccw = grid.index_of(-1.0)
    assert sigma_P(grid, opto.with_coupling(0.0), damping, 1e-5, 1.0, ccw) == 0
    assert sigma_P(grid, opto, damping, 0.0, 1.0, ccw) == 0
    with pytest.raises(ValueError):
        sigma_P(grid, opto, damping, 1e-5, 1.0, grid.index_of(1.0))
    exact = sigma_P(grid, opto, damping, 1e-5, 1.0, ccw, "exact", "lorentzian")
    closed = sigma_P(grid, opto, damping, 1e-5, 1.0, ccw, "lorentzian", "lorentzian")
    assert exact.imag < 0  # suppresses backscattering
    assert abs(exact - closed) / abs(closed) < 0.05


@pytest.mark.parametrize("rho_gamma", [2.0, 5.0, 10.0])
@pytest.mark.parametrize("x", [1e-3, 0.1, 1.0, 100.0])
def test_closed_forms_assemble_into_diffusion_ratio(rho_gamma, x):
    gamma = rho_gamma * 1e-4
    grid = centered_grid(1.0, 1e-4, 1.0, 20 * gamma)
    rho = grid.density_of_states
    kappa = 100 * gamma
    c = float(coupling_for_power(x, 1.0, gamma, kappa))
    opto = OptoParams(-1.0, kappa, c, 1.0, phonon_width=gamma / 2)
    damping = PhononDamping(gamma)
    U = 1e-6
    sp = sigma_P(grid, opto, damping, U, 1.0, grid.index_of(-1.0), "lorentzian", "lorentzian")
    sd = sigma_D(grid, damping, U, 1.0, "approx")
    assert 1 + sp.imag / sd.imag == pytest.approx(diffusion_ratio(x, rho, gamma), rel=1e-12)


def test_born_ratio_tracks_closed_form(dense_setup):
    grid, opto, damping = dense_setup
    rho = grid.density_of_states
    ccw = grid.index_of(-1.0)
    for x in (0.01, 1.0, 100.0):
        c = float(coupling_for_power(x, 1.0, GAMMA, opto.kappa))
        born = born_diffusion_ratio(grid, opto.with_coupling(c), damping, 1.0, ccw, "lorentzian")
        assert 0 < born <= 1
        assert born == pytest.approx(diffusion_ratio(x, rho, GAMMA), rel=0.03)


def test_diffusion_ratio_examples():
    assert diffusion_ratio(0.0, 1e4, 2e-4) == 1.0
    assert diffusion_ratio(1e12, 1e4, 2e-4) == pytest.approx(1 - 1 / (4 * np.pi), abs=1e-9)
    assert 1 - 1 / (4 * np.pi) == pytest.approx(0.920, abs=1e-3)
    for rg, plateau in ((2, 0.920), (5, 0.968), (10, 0.984)):
        assert diffusion_ratio(1e12, rg, 1.0) == pytest.approx(plateau, abs=1e-3)


@given(x=st.floats(0, 1e6), rg=st.floats(0.5, 100), dx=st.floats(1e-6, 1e3))
def test_diffusion_ratio_monotone_and_bounded(x, rg, dx):
    y0 = diffusion_ratio(x, rg, 1.0)
    y1 = diffusion_ratio(x + dx, rg, 1.0)
    floor = 1 - 1 / (2 * np.pi * rg)
    assert floor - 1e-12 <= y1 <= y0 <= 1.0


@settings(deadline=None, max_examples=40)
@given(detune=st.floats(-5, 5), x=st.floats(1e-4, 1e3))
def test_eta_lies_in_upper_half_plane(detune, x):
    grid = build_mode_grid(20, 2e-4, 1.0, 1.0 - 2e-3)
    kappa = 0.1
    opto = OptoParams(-1.0, kappa, float(coupling_for_power(x, 1.0, GAMMA, kappa)), 1.0, phonon_width=GAMMA / 2)
    data = rank_one(grid, opto, PhononDamping(GAMMA), 1.0 + detune * GAMMA)
    assert data.eta.imag >= 0


def test_pump_power_roundtrip():
    c = coupling_for_power(3.0, 2.0, 1e-3, 0.1)
    assert pump_power(c, 2.0, 1e-3, 0.1) == pytest.approx(3.0)
    assert eta(0, 1j) == 0


def test_predictions_csv(tmp_path):
    p = write_predictions_csv(tmp_path / "p.csv", [(0.0, 2.0, 1.0, 1e-4, 0.0, 0.1)])
    lines = p.read_text().splitlines()
    assert lines[0] == "x,rho_gamma,diffusion_ratio,sigmaD_im,sigmaP_im,kappa_tilde"
    assert lines[1] == "0.0,2.0,1.0,0.0001,0.0,0.1"
