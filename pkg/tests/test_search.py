import math

import numpy as np
import pytest

from regrates.search import golden_max, int_sup, log_inf, log_sup


def test_golden_max_quadratic():
    x, fx = golden_max(lambda s: -(s - 0.3) ** 2, -1.0, 2.0, 1e-12)
    assert abs(x - 0.3) < 1e-6 and fx == pytest.approx(0.0, abs=1e-12)


def test_golden_max_plateau_does_not_hang():
    x, fx = golden_max(lambda s: 1.0, 0.0, 1.0)
    assert fx == 1.0 and 0.0 <= x <= 1.0


def test_log_sup_interior_peak():
    # t / (1 + t**2) peaks at t = 1 with value 1/2
    res = log_sup(lambda u: u - np.log1p(np.exp(2 * u)), 1e-3, 1e3)
    assert res.converged
    assert res.value == pytest.approx(0.5, rel=1e-14)
    assert res.arg_sup == pytest.approx(1.0, rel=1e-5)


def test_log_sup_extends_grid():
    # peak at t = 1e7, far beyond the initial window
    res = log_sup(lambda u: u - np.log1p(np.exp(2 * (u - math.log(1e7)))), 1e-2, 1e2)
    assert res.converged
    assert res.arg_sup == pytest.approx(1e7, rel=1e-5)


def test_log_sup_flags_unbounded():
    res = log_sup(lambda u: u, 1.0, 10.0, extend=2)
    assert not res.converged


def test_log_sup_finds_secondary_peak():
    # two bumps, the right one higher
    def f(u):
        return np.log(np.exp(-((u - 0.0) ** 2)) + 2.0 * np.exp(-((u - 10.0) ** 2)))

    res = log_sup(f, 1e-3, 1e7)
    assert res.value == pytest.approx(2.0, rel=1e-9)


def test_log_inf():
    res = log_inf(lambda u: np.log(np.exp(u) + np.exp(-u)), 1e-3, 1e3)
    assert res.value == pytest.approx(2.0, rel=1e-12)


def test_int_sup_matches_brute_force():
    # k * 0.999**k peaks near k = 1000
    def f(k):
        return np.log(np.maximum(k, 1e-300)) + k * math.log(0.999)

    ks = np.arange(0, 20001)
    brute = ks[np.argmax(f(ks.astype(float)))]
    value, k, _ = int_sup(f)
    assert k == brute
    assert value == pytest.approx(math.exp(f(np.array([float(brute)]))[0]), rel=1e-14)


def test_int_sup_bounded_range():
    value, k, used = int_sup(lambda k: -np.abs(k - 7.0), k_max=20)
    assert (value, k, used) == (1.0, 7, 20)
