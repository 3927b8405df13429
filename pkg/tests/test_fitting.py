import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiral_phonons.diagrammatics import diffusion_ratio
from chiral_phonons.ensemble import FitError
from chiral_phonons.experiments.fitting import fit_saturating, saturating

X = np.concatenate([[0.0], np.geomspace(1e-3, 100, 11)])


def test_noiseless_recovery():
    fit = fit_saturating(X, saturating(X, 0.5, 2 * np.pi))
    assert fit.a == pytest.approx(0.5, rel=1e-6)
    assert fit.b == pytest.approx(2 * np.pi, rel=1e-6)
    assert fit.residual < 1e-8


def test_closed_form_curve_has_expected_parameters():
    fit = fit_saturating(X, diffusion_ratio(X, 5.0, 1.0), rho_gamma=5.0)
    assert fit.a == pytest.approx(0.5, rel=1e-6)
    assert fit.b / np.pi == pytest.approx(5.0, rel=1e-6)


def test_constant_curve_is_degenerate():
    fit = fit_saturating(X, np.ones_like(X))
    assert fit.degenerate and fit.a == 0 and np.isnan(fit.b)


def test_needs_four_distinct_points():
    with pytest.raises(ValueError):
        fit_saturating([0, 1, 1, 2], [1, 0.9, 0.9, 0.8])


def test_unfittable_data_raises():
    x = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    y = np.array([1.0, np.nan, 0.5, 0.4, 0.3])
    with pytest.raises((FitError, ValueError)):
        fit_saturating(x, y)


@settings(deadline=None, max_examples=30)
@given(a=st.floats(0.05, 2.0), b=st.floats(0.5, 100.0), seed=st.integers(0, 1000))
def test_recovery_under_small_noise(a, b, seed):
    rng = np.random.default_rng(seed)
    sigma = np.full(X.size, 1e-5)
    y = saturating(X, a, b) + rng.normal(0, 1e-5, X.size)
    fit = fit_saturating(X, y, sigma)
    se = np.sqrt(np.diag(fit.covariance))
    assert abs(fit.a - a) < 6 * se[0] + 1e-9
    assert abs(fit.b - b) < 6 * se[1] + 1e-9
