import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import bisect

from regrates.builtin import diag_example, dirac
from regrates.noisy import (
    StoppingError,
    apriori_alpha,
    discrepancy_stop,
    landweber_discrepancy_sweep,
    landweber_splitting_check,
    make_noise,
    optimal_alpha,
    quasiopt_ratio,
    rate_exponent_fit,
    stopped_error_chain,
    tikhonov_apriori_sweep,
    tikhonov_noisy_error,
    tikhonov_splitting_check,
    trigger_check,
)
from regrates.rates import tikhonov_error
from regrates.regularizers import NoisyData
from regrates.spectral import SpectralElement, SpectralProblem

from conftest import elements


@pytest.mark.parametrize("strategy", ["worst", "random"])
def test_noise_has_exact_level(strategy):
    p = diag_example(50)
    d = make_noise(p, 1e-3, strategy, seed=4)
    assert np.linalg.norm(d.noise) == pytest.approx(1e-3, rel=1e-15)


def test_worst_noise_sits_on_smallest_eigenvalue():
    d = make_noise(diag_example(10), 0.1, "worst")
    assert d.noise[0] == pytest.approx(0.1) and np.all(d.noise[1:] == 0)


def test_zero_noise_and_seeding():
    p = diag_example(10)
    assert np.all(make_noise(p, 0.0, "random", seed=1).noise == 0)
    a = make_noise(p, 0.1, "random", seed=9).noise
    b = make_noise(p, 0.1, "random", seed=9).noise
    np.testing.assert_array_equal(a, b)


def test_apriori_alpha_golden():
    x = diag_example(10**5).element
    alpha = apriori_alpha(x, 1e-3)
    # frozen after a verified run; independent bisection agrees
    assert alpha == pytest.approx(0.0036367628704540, rel=1e-12)
    lam, c = x.eigenvalues, x.coefficients
    ref = bisect(lambda a: math.sqrt(a) * np.linalg.norm(a / (a + lam) * c) - 5e-4, 1e-8, 1.0,
                 xtol=1e-16, rtol=1e-15)
    assert alpha == pytest.approx(ref, rel=1e-12)
    # insensitive to the truncation
    assert apriori_alpha(diag_example(2 * 10**5).element, 1e-3) == pytest.approx(alpha, rel=1e-6)


@given(elements(), st.floats(-5, -1))
def test_apriori_alpha_solves_rule(x, log_delta):
    delta = 10.0**log_delta
    try:
        alpha = apriori_alpha(x, delta)
    except ValueError:
        assert math.sqrt(1e8 * x.eigenvalues[-1]) * x.norm() < delta / 2 * 1.01
        return
    assert math.sqrt(alpha) * tikhonov_error(x, alpha) == pytest.approx(delta / 2, rel=1e-9)


def test_optimal_alpha_beats_apriori():
    p = diag_example(1000)
    d = make_noise(p, 1e-3, "random", seed=2)
    alpha, err = optimal_alpha(p, d)
    assert err <= tikhonov_noisy_error(p, d, apriori_alpha(p.element, 1e-3)) * (1 + 1e-12)
    assert tikhonov_noisy_error(p, d, alpha) == pytest.approx(err, rel=1e-12)


def test_discrepancy_stops_immediately_for_large_noise():
    p = dirac(1.0)
    d = make_noise(p, 2.0, "random", seed=0)
    assert discrepancy_stop(p, d, 1.5, 1.0).k == 0


@pytest.mark.parametrize("lam,c,delta", [(0.5, 1.0, 1e-3), (0.05, -2.0, 1e-2), (0.9, 1.0, 1e-6)])
def test_discrepancy_single_atom_closed_form(lam, c, delta):
    p = SpectralProblem(SpectralElement([lam], [c]), operator_norm_sq=1.0)
    d = NoisyData(p.clean_data(), np.array([delta]), delta)
    tau = 1.5
    r0 = abs(d.observed[0])
    expected = math.ceil(math.log(tau * delta / r0) / math.log(1 - lam))
    assert discrepancy_stop(p, d, tau, 1.0).k == expected


def test_discrepancy_cap_diagnostic():
    p = diag_example(1000)
    d = make_noise(p, 1e-6, "random", seed=0)
    with pytest.raises(StoppingError, match="smooth"):
        discrepancy_stop(p, d, 1.5, 1.0, k_cap=10)


def test_discrepancy_rejects_tau():
    p = dirac(1.0)
    with pytest.raises(ValueError):
        discrepancy_stop(p, make_noise(p, 0.1), tau=1.0)


def test_rate_fit_exact_power():
    deltas = 10.0 ** -np.arange(1, 6)
    slope, intercept, rms = rate_exponent_fit(list(zip(deltas, 3.0 * deltas ** (2 / 3))))
    assert slope == pytest.approx(2 / 3, abs=1e-12)
    assert intercept == pytest.approx(math.log(3.0), abs=1e-12)
    assert rms < 1e-12


def test_rate_fit_validation():
    with pytest.raises(ValueError):
        rate_exponent_fit([(0.1, 1.0), (0.01, 0.5)])
    with pytest.raises(ValueError):
        rate_exponent_fit([(0.01, 1.0), (0.1, 0.5), (0.001, 0.1)])


@given(elements(), st.floats(-4, -1), st.integers(0, 2**31))
def test_splittings(x, log_delta, seed):
    p = SpectralProblem(x, operator_norm_sq=1.0)
    delta = 10.0**log_delta
    d = make_noise(p, delta, "random", seed=seed)
    for alpha in (1e-5, 1e-2, 1.0):
        assert tikhonov_splitting_check(p, d, alpha).passed
    assert landweber_splitting_check(p, d, 1.0, (0, 1, 3, 50, 2000)).passed


@given(elements(), st.floats(-4, -1), st.integers(0, 2**31), st.integers(0, 500))
def test_trigger_and_chain(x, log_delta, seed, k):
    p = SpectralProblem(x, operator_norm_sq=1.0)
    d = make_noise(p, 10.0**log_delta, "random", seed=seed)
    assert trigger_check(p, d, 1.5, 1.0, k).passed
    for nu in (0.25, 1.0):
        assert stopped_error_chain(x, k, nu, 1.0).passed


def test_quasiopt_dirac():
    rep = quasiopt_ratio(dirac(1.0).element, 0.5)
    assert rep.passed
    assert rep.values["max"] <= 2.0


def test_quasiopt_degenerate_nu_zero():
    x = diag_example(200).element
    rep = quasiopt_ratio(x, 0.0, n_random=8)
    assert rep.passed
    # at nu = 0 the right side is ||x||
    assert rep.values["rhs"] == pytest.approx(x.norm(), rel=1e-12)


def test_quasiopt_landweber_ratio_order_of_magnitude():
    rep = quasiopt_ratio(diag_example(2000).element, 1.0, method="landweber", n_random=4)
    ratios = np.array(rep.values["ratios"])
    assert np.all(ratios > 0)
    assert ratios.max() / ratios.min() < 100
    with pytest.raises(ValueError):
        quasiopt_ratio(diag_example(20).element, 0.05, method="landweber")


def test_sweeps_independent_of_workers():
    p = diag_example(2000)
    a = landweber_discrepancy_sweep(p, seed=5, workers=1)
    b = landweber_discrepancy_sweep(p, seed=5, workers=4)
    assert a.params == b.params and a.errors == b.errors
    t1 = tikhonov_apriori_sweep(p, strategy="random", seed=5, workers=1)
    t2 = tikhonov_apriori_sweep(p, strategy="random", seed=5, workers=3)
    assert t1.errors == t2.errors


def test_zero_delta_rows():
    p = diag_example(100)
    lw = landweber_discrepancy_sweep(p, [1e-2, 0.0])
    assert lw.errors[1] == 0.0 and lw.params[1] == math.inf
    tk = tikhonov_apriori_sweep(p, [1e-2, 0.0])
    assert tk.errors[1] == 0.0
