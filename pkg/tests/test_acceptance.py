"""Acceptance criteria, one test per criterion, each printing a pass/fail line."""
import math
import time

import numpy as np
import pytest

from regrates.builtin import bvp_sign, diag_example, dirac, powerlaw
from regrates.distance import conjugate_equivalence_check, d_e_identity
from regrates.interp import interp_norm, n_theta, triple_norm, variational_sup
from regrates.noisy import landweber_discrepancy_sweep, quasiopt_ratio, tikhonov_apriori_sweep
from regrates.rates import c1_constant, c2_constant, delta_rate, landweber_normalized, tikhonov_rate
from regrates.spectral import SpectralElement
from regrates.verify import propositions_suite, random_element

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

ZETA3 = 1.2020569031595942


def verdict(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def test_1_zeta3_golden():
    t0 = time.perf_counter()
    value = triple_norm(diag_example(10**5).element, 1.0).value ** 2
    elapsed = time.perf_counter() - t0
    # the neglected tail sum_{n > 1e5} n**-3 is below 5e-11
    ok = abs(value - ZETA3) <= 1e-8 and elapsed < 1.0
    assert verdict("1 zeta(3) golden", ok, f"value={value!r} runtime={elapsed:.3f}s")


def test_2_landweber_example_goldens():
    t0 = time.perf_counter()
    x = diag_example(10**6).element
    vals = landweber_normalized(x, 1.0, np.array([0, 1, 2, 10**4]), 0.0, 1.0) ** 2
    targets = (1.096**2, 0.5453**2, 0.5475**2, 0.25)
    ok_vals = all(abs(v - t) <= 1e-3 for v, t in zip(vals, targets))
    c1_1 = c1_constant(1.0, 0.0, 1.0, k_max=1)[0]
    c1_2 = c1_constant(1.0, 0.0, 1.0, k_max=2)[0]
    c1, _ = c1_constant(1.0, 0.0, 1.0)
    seq_ok = c1_1 == c1_2 == c1 == pytest.approx(1 / 3, rel=1e-15)
    rr = delta_rate(x, 1.0, 0.0, 1.0)
    sandwich = (1 / 3) * 1.096 <= rr.sup_value + 1e-3 and rr.sup_value <= 1.135 * 1.096 + 1e-3
    elapsed = time.perf_counter() - t0
    ok = ok_vals and seq_ok and sandwich and rr.passed and elapsed < 30.0
    assert verdict("2 Landweber example goldens", ok,
                   f"values={np.round(vals, 6).tolist()} c1={c1!r} Delta={rr.sup_value:.6f} "
                   f"bounds=({rr.bounds[0]:.4f}, {rr.bounds[1]:.4f}) runtime={elapsed:.1f}s")


def test_3_constants():
    c2, a_star, i_bar = c2_constant()
    ok = abs(c2 - 1.135) <= 2e-3 and abs(a_star - 0.3164) <= 1e-3 and abs(i_bar - 1.288) <= 2e-3
    assert verdict("3 constants", ok, f"c2={c2:.7f} a*={a_star:.7f} I(a*)={i_bar:.7f}")


def test_4_dirac_closed_forms():
    worst = 0.0
    for nu_frac in (0.1, 0.3, 0.5, 0.7, 0.9):
        for gamma in (0.5, 1.0, 1.5, 2.0, 3.0):
            for lam0 in (0.2, 1.0, 5.0):
                nu = nu_frac * gamma
                got = interp_norm(dirac(lam0).element, nu, gamma).value
                exact = lam0 ** (-nu) / n_theta(nu_frac)
                worst = max(worst, abs(got - exact) / exact)
    sup = tikhonov_rate(dirac(1.0).element, 0.5, 1).sup_value
    ok = worst <= 1e-9 and abs(sup - 0.5) <= 1e-9
    assert verdict("4 Dirac closed forms", ok, f"max rel err={worst:.2e} tikhonov sup={sup!r}")


def test_5_powerlaw():
    value = interp_norm(powerlaw(0.5, 10**4).element, 0.5, 1.0).value ** 2
    ok = abs(value / (math.pi / 2) - 1) <= 0.01
    assert verdict("5 power law", ok, f"value={value:.6f} ratio to pi/2={value / (math.pi / 2):.6f}")


def test_6_proposition_suites():
    t0 = time.perf_counter()
    rep = propositions_suite(n=100, seed=0, max_atoms=50)
    elapsed = time.perf_counter() - t0
    ok = rep.passed and elapsed < 60.0
    ids = sorted({c.id.split("[")[0] for c in rep.failures})
    assert verdict("6 proposition suites", ok,
                   f"{len(rep.checks)} checks, {len(rep.failures)} violations {ids} runtime={elapsed:.1f}s")


def test_7_distance_identities():
    rng = np.random.default_rng(7)
    xs = [random_element(rng, 20) for _ in range(20)]
    de_fail, conj_fail, worst = 0, 0, 0.0
    for x in xs:
        for theta in (0.25, 0.5, 0.75):
            rep = d_e_identity(x, theta, 1.0, rtol=1e-4)
            de_fail += not rep.passed
            t = rep.values["target"]
            worst = max(worst, abs(rep.values["D"] - t) / t, abs(rep.values["E"] - t) / t)
        for t in np.logspace(-3, 2, 20):
            conj_fail += not conjugate_equivalence_check(x, 1.0, float(t)).passed
    ok = de_fail == 0 and conj_fail == 0
    assert verdict("7 distance-function identities", ok,
                   f"D=E failures={de_fail}/60 (max rel dev {worst:.1e}), conjugate failures={conj_fail}/400")


def test_8a_landweber_discrepancy_slopes():
    sweep = landweber_discrepancy_sweep(diag_example(10**5), tau=1.5, strategy="random", seed=0, nu=1.0)
    err_slope = sweep.fit()[0]
    k_slope = sweep.param_fit()[0]
    ok = abs(err_slope - 2 / 3) <= 0.05 and abs(k_slope + 2 / 3) <= 0.1
    assert verdict("8a noisy Landweber + discrepancy", ok,
                   f"error slope={err_slope:.4f} kbar slope={k_slope:.4f} kbar={sweep.params}")


@pytest.mark.xfail(strict=True, reason="a Dirac atom is smooth beyond nu = 1/2; the a priori rule "
                                       "then converges like delta**(2/3), not delta**(1/2)")
def test_8b_tikhonov_apriori_dirac_slope():
    # worst case over the noise ball for one atom: noise opposing the coefficient
    sweep = tikhonov_apriori_sweep(dirac(1.0), strategy="resonant")
    slope = sweep.fit()[0]
    ok = abs(slope - 0.5) <= 0.05
    verdict("8b Tikhonov a priori on Dirac (expected failure, see notes)", ok, f"error slope={slope:.4f}")
    assert ok


def test_8c_apriori_quasioptimality():
    rep = quasiopt_ratio(dirac(1.0).element, 0.5)
    worst = rep.values["max"]
    assert verdict("8c a priori quasioptimality", rep.passed and worst <= 2.0,
                   f"max LHS/RHS={worst:.4f} (bound 2)")


def test_9_bvp_saturation():
    def sup(n, nu):
        return tikhonov_rate(bvp_sign(n).element, nu, 1).sup_value

    s12, s13 = sup(2**12, 0.25), sup(2**13, 0.25)
    t12, t13 = sup(2**12, 0.3), sup(2**13, 0.3)
    stable = abs(s13 / s12 - 1)
    growth = t13 / t12 - 1
    ok = stable < 0.01 and growth > 0.05
    assert verdict("9 BVP rate saturation", ok,
                   f"nu=1/4 change={stable:.2e} nu=0.3 growth={growth:.3%}")


def angle_oracle(x, nu, gamma, points=10**6):
    phi = np.linspace(0.0, 2 * np.pi, points, endpoint=False)
    w = np.stack([np.cos(phi), np.sin(phi)])
    smooth = np.sqrt((((x.eigenvalues**gamma)[:, None] * w) ** 2).sum(axis=0))
    return float(np.max(np.abs(x.coefficients @ w) * smooth ** (-nu / gamma)))


def test_10_variational_sup_two_atoms():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(10):
        lam = np.sort(10.0 ** rng.uniform(-3, 0, 2))
        x = SpectralElement(lam, rng.standard_normal(2))
        gamma = float(rng.choice([0.5, 1.0, 2.0]))
        nu = float(rng.uniform(0.1, 0.9)) * gamma
        oracle = angle_oracle(x, nu, gamma)
        target = n_theta(nu / gamma) * interp_norm(x, nu, gamma).value
        got = variational_sup(x, nu, gamma).value
        worst = max(worst, abs(got - oracle) / oracle, abs(target - oracle) / oracle)
    assert verdict("10 variational sup (two atoms)", worst <= 1e-3, f"max rel dev from angle oracle={worst:.2e}")
