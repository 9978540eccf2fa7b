import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from regrates.interp import triple_norm
from regrates.regularizers import (
    FilterSpec,
    NoisyData,
    cutoff,
    error_factor,
    landweber,
    landweber_iterate,
    landweber_run,
    regularization_error,
    tikhonov,
    tikhonov_solve_noisy,
)
from regrates.spectral import SpectralElement, SpectralProblem

from conftest import elements


def test_filter_validation():
    with pytest.raises(ValueError):
        FilterSpec("spline", 1.0)
    with pytest.raises(ValueError):
        tikhonov(0.0)
    with pytest.raises(ValueError):
        landweber(1.5)
    with pytest.raises(ValueError):
        tikhonov(1.0, k=0)


def test_error_factors():
    lam = np.array([0.5, 1.0, 2.0])
    np.testing.assert_array_equal(error_factor(cutoff(1.0), lam), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(error_factor(tikhonov(1.0, 2), lam), (1 / (1 + lam)) ** 2)
    np.testing.assert_allclose(error_factor(landweber(3, 0.5), lam), (1 - 0.5 * lam) ** 3)
    assert error_factor(landweber(0, 0.5), 2.0) == 1.0


def test_landweber_step_too_large():
    with pytest.raises(ValueError, match="exceeds 1"):
        error_factor(landweber(1, 1.0), np.array([0.5, 2.0]))


@given(elements(), st.floats(0.1, 2.0), st.floats(-5, 1))
def test_cutoff_error_bound(x, nu, log_alpha):
    alpha = 10.0**log_alpha
    err = regularization_error(x, cutoff(alpha))
    assert err <= alpha**nu * triple_norm(x, nu).value * (1 + 1e-12)


@given(elements())
def test_errors_monotone(x):
    alphas = 10.0 ** np.linspace(-6, 2, 30)
    tik = [regularization_error(x, tikhonov(a)) for a in alphas]
    assert np.all(np.diff(tik) >= -1e-15)
    lw = [regularization_error(x, landweber(k)) for k in range(30)]
    assert np.all(np.diff(lw) <= 1e-15)


def test_noisy_data_checks_level():
    with pytest.raises(ValueError):
        NoisyData(np.ones(2), np.array([0.3, 0.4]), 0.4)
    d = NoisyData(np.ones(2), np.array([0.3, 0.4]), 0.5)
    np.testing.assert_allclose(d.observed, [1.3, 1.4])


def test_tikhonov_single_atom_minimizes_functional():
    lam, c, eta, alpha = 0.3, 1.2, 0.05, 0.02
    p = SpectralProblem(SpectralElement([lam], [c]))
    d = NoisyData(p.clean_data(), np.array([eta]), eta)
    y = d.observed[0]
    res = minimize_scalar(lambda v: (np.sqrt(lam) * v - y) ** 2 + alpha * v * v,
                          bracket=(-10, 10), method="golden", tol=1e-12)
    got = tikhonov_solve_noisy(p, d, alpha).coefficients[0]
    assert got == pytest.approx(res.x, rel=1e-8)


@given(elements(), st.integers(1, 4), st.floats(-4, 1))
def test_iterated_tikhonov_matches_factor(x, k, log_alpha):
    alpha = 10.0**log_alpha
    p = SpectralProblem(x)
    sol = tikhonov_solve_noisy(p, NoisyData.exact(p), alpha, k)
    err = np.linalg.norm(x.coefficients - sol.coefficients)
    assert err == pytest.approx(regularization_error(x, tikhonov(alpha, k)), rel=1e-9, abs=1e-14)


@given(elements(), st.integers(0, 2**31))
def test_landweber_recurrence_matches_closed_form(x, seed):
    p = SpectralProblem(x)
    noise = np.random.default_rng(seed).standard_normal(len(x))
    noise *= 1e-2 / np.linalg.norm(noise)
    d = NoisyData(p.clean_data(), noise, 1e-2)
    run = landweber_run(p, d, sigma=1.0, k_max=25)
    for k in (0, 1, 7, 25):
        lit = landweber_iterate(p, d, 1.0, k)
        assert run.errors[k] == pytest.approx(np.linalg.norm(x.coefficients - lit.coefficients),
                                              rel=1e-9, abs=1e-13)
        assert run.residuals[k] == pytest.approx(
            np.linalg.norm(d.observed - np.sqrt(x.eigenvalues) * lit.coefficients), rel=1e-9, abs=1e-13)
