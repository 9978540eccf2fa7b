"""Noisy data, parameter choice, the discrepancy principle and rate fitting."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .checks import Report, leq
from .rates import c2_constant, tikhonov_error, tikhonov_rate
from .interp import triple_norm
from .regularizers import NoisyData, default_sigma, landweber_state
from .search import log_inf
from .spectral import SpectralElement, SpectralProblem

__all__ = [
    "make_noise",
    "apriori_alpha",
    "tikhonov_noisy_error",
    "optimal_alpha",
    "StopResult",
    "StoppingError",
    "discrepancy_stop",
    "iteration_estimate",
    "quasiopt_ratio",
    "rate_exponent_fit",
    "NoisySweep",
    "tikhonov_apriori_sweep",
    "landweber_discrepancy_sweep",
    "stopped_error_chain",
    "trigger_check",
    "tikhonov_splitting_check",
    "landweber_splitting_check",
    "DEFAULT_DELTAS",
]

DEFAULT_DELTAS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
DEFAULT_TAU = 1.5
STRATEGIES = ("worst", "random", "resonant")


def make_noise(p: SpectralProblem, delta: float, strategy: str = "random", seed: int = 0,
               alpha: float | None = None) -> NoisyData:
    """Noise of norm exactly ``delta`` added to the clean data of ``p``.

    ``worst`` puts all noise on the smallest eigenvalue; ``random`` draws a
    uniform direction on the sphere; ``resonant`` puts noise on the atom where
    the Tikhonov noise amplification ``sqrt(lambda)/(lambda+alpha)`` peaks, with
    the sign that opposes the clean coefficient.
    """
    lam = p.eigenvalues
    if lam.size == 0:
        raise ValueError("empty spectrum")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    y = p.clean_data()
    eta = np.zeros_like(lam)
    if delta == 0:
        return NoisyData(y, eta, 0.0)
    if strategy == "worst":
        eta[0] = delta
    elif strategy == "random":
        g = np.random.default_rng(seed).standard_normal(lam.size)
        eta = delta * g / np.linalg.norm(g)
    elif strategy == "resonant":
        if alpha is None:
            raise ValueError("resonant noise needs alpha")
        i = int(np.argmax(np.sqrt(lam) / (lam + alpha)))
        eta[i] = -delta if p.element.coefficients[i] > 0 else delta
    else:
        raise ValueError(f"unknown noise strategy {strategy!r}")
    # renormalize so that ||eta|| == delta holds after rounding
    eta *= delta / np.linalg.norm(eta)
    return NoisyData(y, eta, delta)


def apriori_alpha(x: SpectralElement, delta: float, cap: float = 1e8) -> float:
    """Solve ``sqrt(alpha) ||x_dagger - x_alpha|| = delta / 2`` for alpha.

    The left side is strictly increasing in alpha; the root is bracketed on a
    log scale up to ``cap * ||T*T||``.
    """
    if x.is_zero():
        raise ValueError("x must be nonzero")
    if not delta > 0:
        raise ValueError("delta must be positive")
    target = math.log(delta / 2.0)

    def h(s):
        a = math.exp(s)
        return 0.5 * s + math.log(tikhonov_error(x, a)) - target

    hi = math.log(cap * x.eigenvalues[-1])
    if h(hi) < 0:
        raise ValueError(f"delta={delta} too large: no root below alpha={math.exp(hi)}")
    lo = math.log(x.eigenvalues[0])
    while h(lo) > 0:
        lo -= 10.0
    s = brentq(h, lo, hi, xtol=1e-14, rtol=1e-13, maxiter=500)
    return math.exp(s)


def tikhonov_noisy_error(p: SpectralProblem, d: NoisyData, alpha: float, k: int = 1) -> float:
    """``||x_dagger - x^delta_{alpha,k}||``."""
    lam = p.eigenvalues
    data = d.observed / np.sqrt(lam)
    prev = np.zeros_like(lam)
    for _ in range(k):
        prev = (lam * data + alpha * prev) / (lam + alpha)
    return float(np.linalg.norm(p.element.coefficients - prev))


def optimal_alpha(p: SpectralProblem, d: NoisyData, k: int = 1) -> tuple[float, float]:
    """``(alpha*, error*)`` minimizing the noisy Tikhonov error over alpha."""
    lam = p.eigenvalues
    root = np.sqrt(lam)
    c = p.element.coefficients
    y = d.observed
    rows = max(1, 2_000_000 // lam.size)

    def log_err(s):
        s = np.atleast_1d(s)
        out = np.empty(s.size)
        for a in range(0, s.size, rows):
            al = np.exp(s[a:a + rows, None])
            x_alpha = root * y / (lam + al) if k == 1 else _iterate(lam, y / root, al, k)
            with np.errstate(divide="ignore"):
                out[a:a + rows] = np.log(np.linalg.norm(c - x_alpha, axis=1))
        return out

    res = log_inf(log_err, lam[0] * 1e-4, lam[-1] * 1e4)
    return res.arg_sup, res.value


def _iterate(lam, data, al, k):
    prev = np.zeros((al.shape[0], lam.size))
    for _ in range(k):
        prev = (lam * data + al * prev) / (lam + al)
    return prev


class StopResult(NamedTuple):
    k: int
    error: float
    residual: float


class StoppingError(RuntimeError):
    """The discrepancy principle was not met before the iteration cap."""


def iteration_estimate(x: SpectralElement, delta: float, nu: float, tau: float,
                       sigma: float) -> int:
    """Iterations after which the noise-free residual is below ``delta (tau - 1)``.

    From the Landweber rate bound with ``r = 1/2``:
    ``delta (tau-1) <= eps_k**(nu+1/2) c2 |||x|||_nu``.
    """
    m = nu + 0.5
    scale = c2_constant()[0] * triple_norm(x, nu).value / (delta * (tau - 1))
    k = m / sigma * scale ** (1.0 / m) - m
    return max(0, int(math.ceil(k)))


def discrepancy_stop(p: SpectralProblem, d: NoisyData, tau: float = DEFAULT_TAU,
                     sigma: float | None = None, k_cap: int | None = None,
                     nu: float | None = None) -> StopResult:
    """Smallest k with ``||y^delta - T x_k^delta|| <= tau delta``.

    The residual is nonincreasing in k under the step-size condition, so the
    index is found by doubling followed by bisection. The default cap is 100
    times the a priori iteration estimate for smoothness ``nu`` (or 10**9).
    """
    if not tau > 1:
        raise ValueError("tau must exceed 1")
    lam = p.eigenvalues
    sigma = default_sigma(p) if sigma is None else sigma
    if sigma * lam[-1] > 1 + 1e-14:
        raise ValueError("step size violates sigma ||T*T|| <= 1")
    if k_cap is None:
        if nu is not None and d.delta > 0:
            k_cap = 100 * max(1, iteration_estimate(p.element, d.delta, nu, tau, sigma))
        else:
            k_cap = 10**9
    level = tau * d.delta
    res0 = d.observed
    with np.errstate(divide="ignore"):
        log_q = np.log1p(-sigma * lam)

    def residual(k):
        if k == 0:
            return float(np.linalg.norm(res0))
        return float(np.linalg.norm(np.exp(k * log_q) * res0))

    if residual(0) <= level:
        k = 0
    else:
        hi = 1
        while residual(hi) > level:
            if hi >= k_cap:
                raise StoppingError(
                    f"discrepancy not reached within {k_cap} iterations "
                    f"(residual {residual(hi):.3e} > {level:.3e}); the data may be "
                    "less smooth than assumed"
                )
            hi = min(2 * hi, k_cap)
        lo = hi // 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if residual(mid) > level:
                lo = mid
            else:
                hi = mid
        k = hi
    err, res = landweber_state(p, d, sigma, k)
    return StopResult(k, err, res)


def rate_exponent_fit(pairs) -> tuple[float, float, float]:
    """Least-squares line through ``(log delta, log error)``.

    Returns ``(slope, intercept, rms residual)``.
    """
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3:
        raise ValueError("need at least three (delta, error) pairs")
    if np.any(arr <= 0):
        raise ValueError("deltas and errors must be positive")
    if np.any(np.diff(arr[:, 0]) >= 0):
        raise ValueError("deltas must be strictly decreasing")
    lx, ly = np.log(arr[:, 0]), np.log(arr[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


@dataclass
class NoisySweep:
    """Per-delta outcome of a parameter choice or stopping rule."""

    method: str
    deltas: list
    params: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    policy: tuple = ("random", 0)

    def fit(self):
        pairs = [(d, e) for d, e in zip(self.deltas, self.errors) if d > 0 and e > 0]
        return rate_exponent_fit(pairs)

    def param_fit(self):
        pairs = [(d, k) for d, k in zip(self.deltas, self.params) if d > 0 and 0 < k < math.inf]
        return rate_exponent_fit(pairs)

    def rows(self):
        for d, a, e, r in zip(self.deltas, self.params, self.errors, self.residuals):
            yield {"delta": d, "param": a, "error": e, "residual": r}


def _noise_for(p, delta, strategy, seed, index, alpha=None):
    return make_noise(p, delta, strategy, seed=int(np.random.SeedSequence([seed, index]).generate_state(1)[0]), alpha=alpha)


def _tikhonov_point(p, delta, strategy, seed, index):
    if delta == 0:
        return 0.0, 0.0, 0.0
    lam = p.eigenvalues
    alpha = apriori_alpha(p.element, delta)
    d = _noise_for(p, delta, strategy, seed, index, alpha)
    x_alpha = np.sqrt(lam) * d.observed / (lam + alpha)
    return (alpha, float(np.linalg.norm(p.element.coefficients - x_alpha)),
            float(np.linalg.norm(d.observed - np.sqrt(lam) * x_alpha)))


def _landweber_point(p, delta, strategy, seed, index, tau, sigma, nu):
    if delta == 0:
        # exact data: the discrepancy principle never stops
        return math.inf, 0.0, 0.0
    stop = discrepancy_stop(p, _noise_for(p, delta, strategy, seed, index), tau, sigma, nu=nu)
    return stop.k, stop.error, stop.residual


def _run_sweep(sweep, point, workers):
    idx = range(len(sweep.deltas))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(point, idx))
    else:
        out = [point(i) for i in idx]
    for param, err, res in out:
        sweep.params.append(param)
        sweep.errors.append(err)
        sweep.residuals.append(res)
    return sweep


def tikhonov_apriori_sweep(p: SpectralProblem, deltas=DEFAULT_DELTAS, strategy: str = "worst",
                           seed: int = 0, workers: int = 1) -> NoisySweep:
    """Tikhonov with the a priori rule at each noise level.

    The noise for ``deltas[i]`` depends only on ``(seed, i)``, so results do
    not depend on ``workers``.
    """
    sweep = NoisySweep("tikhonov-apriori", list(deltas), policy=(strategy, seed))
    return _run_sweep(sweep, lambda i: _tikhonov_point(p, deltas[i], strategy, seed, i), workers)


def landweber_discrepancy_sweep(p: SpectralProblem, deltas=DEFAULT_DELTAS, tau: float = DEFAULT_TAU,
                                sigma: float | None = None, strategy: str = "random",
                                seed: int = 0, nu: float | None = None,
                                workers: int = 1) -> NoisySweep:
    """Landweber stopped by the discrepancy principle at each noise level."""
    sweep = NoisySweep("landweber-discrepancy", list(deltas), policy=(strategy, seed))
    return _run_sweep(
        sweep, lambda i: _landweber_point(p, deltas[i], strategy, seed, i, tau, sigma, nu), workers)


def _noise_family(p, delta, seed, n_random, alpha=None):
    yield make_noise(p, delta, "worst")
    if alpha is not None:
        yield make_noise(p, delta, "resonant", alpha=alpha)
    rng = np.random.default_rng(seed)
    for s in rng.integers(0, 2**32, n_random):
        yield make_noise(p, delta, "random", seed=int(s))


def quasiopt_ratio(x: SpectralElement, nu: float, deltas=DEFAULT_DELTAS, method: str = "tikhonov",
                   seed: int = 0, n_random: int = 32, tau: float = DEFAULT_TAU) -> Report:
    """Ratio of the noisy error functional to the noise-free rate functional.

    ``LHS(delta) = delta**(-2 nu) max_noise ||x_dagger - x^delta_chosen||**(2 nu + 1)``
    with the supremum over noise approximated by the worst-aligned, resonant
    and ``n_random`` random directions (so LHS can only be underestimated).
    For Tikhonov with the a priori rule the right side is
    ``sup_alpha alpha**(-nu) ||x_dagger - x_alpha||`` and ``LHS <= 2 RHS`` is checked.
    For Landweber with the discrepancy principle it is
    ``sup_k (1 + k/nu)**nu ||x_dagger - x_k||`` and only the ratio is reported.
    """
    p = SpectralProblem(x)
    ratios = []
    rep = Report()
    if method == "tikhonov":
        if not 0 <= nu <= 1:
            raise ValueError("Tikhonov quasioptimality needs 0 <= nu <= 1")
        rhs = tikhonov_rate(x, nu, 1).sup_value
        for delta in deltas:
            alpha = apriori_alpha(x, delta)
            worst = max(tikhonov_noisy_error(p, d, alpha)
                        for d in _noise_family(p, delta, seed, n_random, alpha))
            lhs = delta ** (-2 * nu) * worst ** (2 * nu + 1)
            ratios.append(lhs / rhs)
            rep.add(leq(f"qo.apriori[delta={delta:g}]", lhs, 2 * rhs, 1e-9))
    elif method == "landweber":
        if nu < 0.1:
            raise ValueError("Landweber quasioptimality is only checked for nu >= 0.1")
        sigma = default_sigma(p)
        rhs = _landweber_rhs(x, nu, sigma)
        for delta in deltas:
            worst = max(discrepancy_stop(p, d, tau, sigma).error
                        for d in _noise_family(p, delta, seed, n_random))
            lhs = delta ** (-2 * nu) * worst ** (2 * nu + 1)
            ratios.append(lhs / rhs)
    else:
        raise ValueError(f"unknown method {method!r}")
    rep.values.update(ratios=ratios, max=max(ratios), min=min(ratios), rhs=rhs)
    return rep


def _landweber_rhs(x, nu, sigma):
    from .search import int_sup

    keep = x.coefficients != 0
    lam = x.eigenvalues[keep]
    log_w = np.log(x.weights[keep])
    with np.errstate(divide="ignore"):
        step = 2.0 * np.log1p(-sigma * lam)

    def obj(ks):
        out = np.empty(ks.size)
        for i, k in enumerate(ks):
            terms = log_w if k == 0 else log_w + k * step
            m = terms.max()
            out[i] = nu * math.log1p(k / nu) + 0.5 * (m + math.log(np.sum(np.exp(terms - m))))
        return out

    return int_sup(obj)[0]


def stopped_error_chain(x: SpectralElement, k: int, nu: float, sigma: float,
                        eps: float | None = None) -> Report:
    """``||x - x_k||**2 <= eps**(2 nu) |||x|||_nu**2 + eps**(-1) ||y - T x_k||**2``.

    ``eps`` defaults to ``(nu + 1/2) / (sigma (k + nu + 1/2))``.
    """
    lam = x.eigenvalues
    eps = (nu + 0.5) / (sigma * (k + nu + 0.5)) if eps is None else eps
    with np.errstate(divide="ignore"):
        q2 = np.exp(2 * k * np.log1p(-sigma * lam)) if k else np.ones_like(lam)
    err_sq = float(np.sum(q2 * x.weights))
    res_sq = float(np.sum(lam * q2 * x.weights))
    head = eps ** (2 * nu) * triple_norm(x, nu).value ** 2
    rep = Report(values={"error_sq": err_sq, "head": head, "tail": res_sq / eps})
    rep.add(leq("LW.stop-chain", err_sq, head + res_sq / eps, 1e-10))
    return rep


def trigger_check(p: SpectralProblem, d: NoisyData, tau: float, sigma: float, k: int) -> Report:
    """If the clean residual is at most ``delta (tau - 1)`` the noisy one is at most ``tau delta``."""
    clean = NoisyData.exact(p)
    _, r_clean = landweber_state(p, clean, sigma, k)
    _, r_noisy = landweber_state(p, d, sigma, k)
    rep = Report(values={"clean": r_clean, "noisy": r_noisy})
    rep.add(leq("LW.residual-gap", abs(r_clean - r_noisy), d.delta, 1e-12, 1e-15))
    if r_clean <= d.delta * (tau - 1):
        rep.add(leq("LW.trigger", r_noisy, tau * d.delta, 1e-12))
    return rep


def tikhonov_splitting_check(p: SpectralProblem, d: NoisyData, alpha: float) -> Report:
    """``||x - x_alpha^delta|| <= ||x - x_alpha|| + delta / (2 sqrt(alpha))``."""
    noisy = tikhonov_noisy_error(p, d, alpha)
    clean = tikhonov_error(p.element, alpha) if not p.element.is_zero() else 0.0
    rep = Report(values={"noisy": noisy, "clean": clean})
    rep.add(leq("tikhonov.splitting", noisy, clean + d.delta / (2.0 * math.sqrt(alpha)), 1e-10))
    return rep


def landweber_splitting_check(p: SpectralProblem, d: NoisyData, sigma: float, ks) -> Report:
    """``||x - x_k^delta|| <= ||x - x_k|| + delta sqrt(sigma k)`` for each k.

    With the step size normalized to one this is ``delta sqrt(k)``.
    """
    clean = NoisyData.exact(p)
    rep = Report()
    for k in ks:
        noisy, _ = landweber_state(p, d, sigma, int(k))
        exact, _ = landweber_state(p, clean, sigma, int(k))
        rep.add(leq(f"landweber.splitting[k={int(k)}]", noisy, exact + d.delta * math.sqrt(sigma * k), 1e-10))
    return rep
