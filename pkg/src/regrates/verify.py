"""Verification suites: constants, propositions on random measures and worked examples."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .builtin import bvp_sign, diag_example, dirac, powerlaw
from .checks import Report, close, leq
from .distance import d_e_identity
from .interp import (
    interp_norm,
    interpolation_inequality_check,
    n_theta,
    commutation_check,
    sandwich_report,
    tail_bound_check,
    triple_norm,
    young_check,
)
from .noisy import landweber_splitting_check, make_noise, tikhonov_splitting_check
from .rates import (
    c1_constant,
    c2_constant,
    delta_rate,
    landweber_normalized,
    tikhonov_more_precise_bound,
    tikhonov_rate,
)
from .spectral import SpectralElement, SpectralProblem

__all__ = [
    "SUITES",
    "random_element",
    "constants_suite",
    "propositions_suite",
    "examples_suite",
    "run_suite",
    "thread_count",
]

SUITES = ("constants", "propositions", "examples", "all")

ZETA3 = 1.2020569031595942


def thread_count(default: int | None = None) -> int:
    """Worker cap from ``REGRATES_THREADS`` (at least one)."""
    raw = os.environ.get("REGRATES_THREADS")
    if raw is None:
        return default or min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"REGRATES_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def random_element(rng: np.random.Generator, max_atoms: int = 50) -> SpectralElement:
    """Random element with at most ``max_atoms`` atoms in ``[1e-4, 1]``; the top atom sits at 1."""
    n = int(rng.integers(1, max_atoms + 1))
    lam = np.unique(10.0 ** rng.uniform(-4.0, 0.0, n))
    lam[-1] = 1.0
    lam = np.unique(lam)
    c = rng.standard_normal(lam.size) * 10.0 ** rng.uniform(-2.0, 1.0, lam.size)
    return SpectralElement(lam, c)


def _rate_checks(rep: Report, tag: str, rr, rtol: float) -> None:
    rep.add(leq(f"{tag}.lower", rr.bounds[0], rr.sup_value, rtol))
    rep.add(leq(f"{tag}.upper", rr.sup_value, rr.bounds[1], rtol))


def constants_suite() -> Report:
    """The Landweber constants and the limit-ratio maximizer."""
    c2, a_star, i_bar = c2_constant()
    rep = Report(values={"c2": c2, "a*": a_star, "I(a*)": i_bar})
    rep.add(close("c2", c2, 1.135, 0.0, 2e-3))
    rep.add(close("a*", a_star, 0.3164, 0.0, 1e-3))
    rep.add(close("I(a*)", i_bar, 1.288, 0.0, 2e-3))
    rep.add(close("c2^2=I(a*)", c2 * c2, i_bar, 1e-12))
    for k in (1, 2):
        c1, _ = c1_constant(1.0, 0.0, 1.0, k_max=k)
        rep.add(close(f"c1[k<={k}]", c1, 1.0 / 3.0, 1e-14))
    c1, k = c1_constant(1.0, 0.0, 1.0)
    rep.values["c1"] = c1
    rep.add(close("c1", c1, 1.0 / 3.0, 1e-14))
    rep.add(close("N_1/2", n_theta(0.5), math.sqrt(2.0), 1e-15))
    return rep


def _propositions_one(i: int, seed: int, max_atoms: int) -> Report:
    rng = np.random.default_rng([seed, i])
    x = random_element(rng, max_atoms)
    rep = Report()
    for nu in (0.0, 0.25, 0.5, 0.75):
        rep.extend(sandwich_report(x, nu, 1.0))
    for k in (1, 2, 3, 5):
        for nu in (0.0, k / 4, k / 2, 3 * k / 4, float(k)):
            _rate_checks(rep, f"tikhonov-rate[k={k},nu={nu:g}]", tikhonov_rate(x, nu, k), 1e-6)
    rep.extend(tikhonov_more_precise_bound(x, 0.5))
    for r in (0.0, 0.5, 1.0):
        _rate_checks(rep, f"landweber-rate[r={r:g}]", delta_rate(x, 0.5, r, sigma=1.0), 1e-8)
    cap = float(rng.choice(x.eigenvalues)) * float(rng.uniform(0.5, 2.0))
    rep.extend(tail_bound_check(x, 0.5, 1.0, 0.5, cap))
    a, b = 10.0 ** rng.uniform(-3, 3, 2)
    rep.add(young_check(a, b, float(rng.uniform(0.0, 1.0))))
    for k in (0.5, 1.0, 2.0, 3.0):
        rep.add(commutation_check(float(10.0 ** rng.uniform(-4, 0)), float(10.0 ** rng.uniform(-3, 1)),
                                  k, float(rng.uniform(0.01, 0.99))))
    for nu in (0.25, 0.5):
        rep.add(interpolation_inequality_check(x, rng.standard_normal(len(x)), nu, 1.0))
    p = SpectralProblem(x)
    delta = float(10.0 ** rng.uniform(-4, -1))
    d = make_noise(p, delta, "random", seed=int(rng.integers(2**32)))
    for alpha in 10.0 ** np.linspace(-6, 1, 8):
        rep.extend(tikhonov_splitting_check(p, d, float(alpha)))
    rep.extend(landweber_splitting_check(p, d, 1.0, (0, 1, 2, 5, 10, 100, 1000)))
    return rep


def propositions_suite(n: int = 100, seed: int = 0, max_atoms: int = 50,
                       workers: int | None = None) -> Report:
    """All proposition-level inequalities on ``n`` seeded random elements."""
    workers = thread_count() if workers is None else workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda i: _propositions_one(i, seed, max_atoms), range(n)))
    rep = Report(values={"measures": n, "seed": seed})
    for part in parts:
        rep.extend(part)
    return rep


def _bvp_sup(n: int, nu: float) -> float:
    return tikhonov_rate(bvp_sign(n).element, nu, 1).sup_value


def examples_suite() -> Report:
    """Closed forms and worked examples."""
    rep = Report()
    tn = triple_norm(diag_example(10**5).element, 1.0)
    rep.values["zeta3"] = tn.value**2
    rep.add(close("zeta3", tn.value**2, ZETA3, 1e-8))

    x = diag_example(10**6).element
    vals = landweber_normalized(x, 1.0, np.array([0, 1, 2, 10**4]), 0.0, 1.0) ** 2
    for name, v, target in zip(("k=0", "k=1", "k=2", "k=1e4"), vals,
                               (1.096**2, 0.5453**2, 0.5475**2, 0.25)):
        rep.add(close(f"diag.landweber.{name}", v, target, 0.0, 1e-3))
    rr = delta_rate(x, 1.0, 0.0, 1.0)
    rep.values["Delta"] = rr.sup_value
    rep.add(leq("diag.landweber.lower", 1.096 / 3.0, rr.sup_value, 0.0, 1e-3))
    rep.add(leq("diag.landweber.upper", rr.sup_value, 1.135 * 1.096, 0.0, 1e-3))

    for nu in (0.25, 0.5, 1.0):
        rep.add(close(f"dirac.triple[nu={nu:g}]", triple_norm(dirac(1.0).element, nu).value, 1.0, 1e-12))
    for lam0 in (0.3, 1.0, 4.0):
        for nu, gamma in ((0.5, 1.0), (0.25, 2.0), (1.0, 1.5)):
            got = interp_norm(dirac(lam0).element, nu, gamma).value
            rep.add(close(f"dirac.interp[{lam0:g},{nu:g},{gamma:g}]", got,
                          lam0 ** (-nu) / n_theta(nu / gamma), 1e-9))
    rep.add(close("dirac.tik", tikhonov_rate(dirac(1.0).element, 0.5, 1).sup_value, 0.5, 1e-9))
    rep.add(close("dirac.D=E", d_e_identity(dirac(1.0).element, 0.5, 1.0).values["D"], 0.5, 1e-4))

    pl = interp_norm(powerlaw(0.5, 10**4).element, 0.5, 1.0).value ** 2
    rep.values["powerlaw"] = pl
    rep.add(close("powerlaw", pl, math.pi / 2, 1e-2))

    s12, s13 = _bvp_sup(2**12, 0.25), _bvp_sup(2**13, 0.25)
    t12, t13 = _bvp_sup(2**12, 0.3), _bvp_sup(2**13, 0.3)
    rep.values["bvp"] = {"1/4": (s12, s13), "0.3": (t12, t13)}
    rep.add(leq("bvp.stable", abs(s13 / s12 - 1.0), 0.01, 0.0, 0.0))
    rep.add(leq("bvp.grows", 0.05, t13 / t12 - 1.0, 0.0, 0.0))
    return rep


def run_suite(name: str, seed: int = 0, workers: int | None = None) -> Report:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    rep = Report()
    if name in ("constants", "all"):
        rep.extend(constants_suite())
    if name in ("propositions", "all"):
        rep.extend(propositions_suite(seed=seed, workers=workers))
    if name in ("examples", "all"):
        rep.extend(examples_suite())
    return rep
