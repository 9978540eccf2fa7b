"""Rate functionals of Tikhonov and Landweber and the constants bracketing them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .checks import Report, leq
from .interp import interp_norm, n_theta, triple_norm
from .search import golden_max, int_sup, log_sup
from .spectral import SpectralElement

__all__ = [
    "RateReport",
    "log_gamma",
    "beta_ratio",
    "limit_ratio",
    "c2_constant",
    "c1_sequence",
    "c1_constant",
    "tikhonov_error",
    "tikhonov_rate",
    "tikhonov_more_precise_bound",
    "saturation_check",
    "landweber_normalized",
    "delta_rate",
    "large_nu_bound_check",
]

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(z: float) -> float:
    """log Gamma(z) for real ``z > 0``."""
    if not z > 0:
        raise ValueError("log_gamma needs z > 0")
    shift = 0.0
    # The series is least accurate below 1/2; step up with Gamma(z+1) = z Gamma(z).
    while z < 0.5:
        shift -= math.log(z)
        z += 1.0
    z -= 1.0
    acc = _LANCZOS[0]
    for i, coef in enumerate(_LANCZOS[1:], start=1):
        acc += coef / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc) + shift


def beta_ratio(s: float, a: float) -> float:
    """``I(s, a) = ((s+a)/a)**a * s * B(s, a+1)``, via log-gamma."""
    if not (s > 0 and a > 0):
        raise ValueError("need s > 0 and a > 0")
    return math.exp(a * math.log1p(s / a) + log_gamma(s + 1) + log_gamma(a + 1)
                    - log_gamma(s + a + 1))


def limit_ratio(a: float) -> float:
    """``lim_{s -> inf} I(s, a) = a**(-a) Gamma(a + 1)``."""
    return math.exp(-a * math.log(a) + log_gamma(a + 1))


def c2_constant(tol: float = 1e-12) -> tuple[float, float, float]:
    """``(c2, a*, Ibar(a*))`` with ``c2 = sqrt(sup_a sup_s I(s, a))``.

    For ``a >= 1`` the map ``s -> I(s, a)`` decreases from 1, for ``a <= 1`` it
    increases to ``Ibar(a)``, so the double supremum is ``max_{a in (0,1]} Ibar``.
    """
    a_star, log_val = golden_max(lambda a: math.log(limit_ratio(a)), 1e-9, 1.0, tol)
    value = max(math.exp(log_val), 1.0)
    return math.sqrt(value), a_star, value


@dataclass(frozen=True)
class RateReport:
    """A supremum over the regularization parameter and the bounds predicted for it."""

    nu: float
    method: str
    sup_value: float
    arg: float
    bounds: tuple
    passed: bool
    r: float = 0.0
    order: int = 1

    def row(self) -> dict:
        return {
            "nu": self.nu, "method": self.method, "order": self.order, "r": self.r,
            "sup": self.sup_value, "arg": self.arg,
            "lower": self.bounds[0], "upper": self.bounds[1], "pass": self.passed,
        }


def _tik_log_obj(x: SpectralElement, nu: float, k: int):
    keep = x.coefficients != 0
    log_lam = np.log(x.eigenvalues[keep])
    log_w = np.log(x.weights[keep])

    def obj(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        terms = log_w[None, :] - 2.0 * k * np.logaddexp(0.0, log_lam[None, :] - s[:, None])
        return 0.5 * logsumexp(terms, axis=1) - nu * s

    return obj


def tikhonov_error(x: SpectralElement, alpha: float, k: int = 1) -> float:
    """``||x_dagger - x_{alpha,k}||`` noise-free."""
    if len(x) == 0:
        return 0.0
    return float(np.sqrt(np.sum((alpha / (alpha + x.eigenvalues)) ** (2 * k) * x.weights)))


def _small_alpha_limit(x: SpectralElement, k: int, rtol: float = 1e-13):
    """``lim_{alpha -> 0} alpha**(-k) error(alpha, k)`` by decreasing alpha until stable."""
    lam = x.eigenvalues
    alpha = lam[0]
    prev = None
    while True:
        val = float(np.sqrt(np.sum((1.0 / (alpha + lam)) ** (2 * k) * x.weights)))
        if prev is not None and abs(val - prev) <= rtol * val:
            return val, alpha
        prev = val
        alpha *= 1e-2
        if alpha < lam[0] * 1e-300:
            return val, alpha


def tikhonov_rate(x: SpectralElement, nu: float, k: int = 1, rtol: float = 1e-6) -> RateReport:
    """``sup_alpha alpha**(-nu) ||x_dagger - x_{alpha,k}||`` against its interpolation-norm bounds.

    Bounds are ``(N_{nu/k}**(1-2k) ||x||_{nu:k}, ||x||_{nu:k})``. At ``nu = 0`` the
    supremum is the limit ``alpha -> inf`` (``||x||``); at ``nu = k`` it is the
    limit ``alpha -> 0`` (``||x||_k``).
    """
    if not 0 <= nu <= k:
        raise ValueError(f"need 0 <= nu <= k, got nu={nu}, k={k}")
    if x.is_zero():
        return RateReport(nu, "tikhonov", 0.0, math.nan, (0.0, 0.0), True, order=k)
    if nu == 0:
        sup, arg = x.norm(), math.inf
    elif nu == k:
        sup, arg = _small_alpha_limit(x, k)
    else:
        res = log_sup(_tik_log_obj(x, nu, k), x.eigenvalues[0] * 1e-4, x.eigenvalues[-1] * 1e4)
        sup, arg = res.value, res.arg_sup
    upper = interp_norm(x, nu, k).value
    lower = n_theta(nu / k) ** (1 - 2 * k) * upper
    ok = leq("lo", lower, sup, rtol).passed and leq("hi", sup, upper, rtol).passed
    return RateReport(nu, "tikhonov", sup, arg, (lower, upper), ok, order=k)


def tikhonov_more_precise_bound(x: SpectralElement, nu: float, rtol: float = 1e-8) -> Report:
    """``||x_dagger - x_alpha|| <= alpha**nu (1-nu)**(-1/2) |||x|||_nu`` for all alpha."""
    if not 0 < nu < 1:
        raise ValueError("need 0 < nu < 1")
    rep = Report()
    if x.is_zero():
        rep.add(leq("tikhonov.tail-bound", 0.0, 0.0))
        return rep
    sup = log_sup(_tik_log_obj(x, nu, 1), x.eigenvalues[0] * 1e-4, x.eigenvalues[-1] * 1e4)
    bound = triple_norm(x, nu).value / math.sqrt(1 - nu)
    rep.values.update(sup=sup.value, arg=sup.arg_sup, bound=bound)
    rep.add(leq("tikhonov.tail-bound", sup.value, bound, rtol))
    return rep


def saturation_check(x: SpectralElement, k: int = 1, decades: int = 40) -> bool:
    """``alpha**(-k) ||x_dagger - x_{alpha,k}||`` does not vanish as alpha decreases.

    The values must be nondecreasing along a decreasing alpha sequence and
    settle at a positive limit (``||x||_k``). Vacuously true for ``x = 0``.
    """
    if x.is_zero():
        return True
    lam = x.eigenvalues
    alphas = lam[-1] * np.logspace(2, -decades, 4 * (decades + 2) + 1)
    vals = np.array([tikhonov_error(x, a, k) / a**k for a in alphas])
    nondecreasing = bool(np.all(np.diff(vals) >= -1e-12 * vals[1:]))
    settled = abs(vals[-1] - vals[-2]) <= 1e-8 * vals[-1]
    return nondecreasing and settled and vals[-1] > 0


def c1_sequence(nu: float, r: float, ks) -> np.ndarray:
    """``(1 - sigma eps_k)**k (eps_{k+1}/eps_k)**(r+nu)``; independent of sigma."""
    m = r + nu
    ks = np.asarray(ks, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        head = np.where(ks == 0, 0.0, ks * np.log(ks / (ks + m)))
    return np.exp(head + m * np.log((ks + m) / (ks + 1 + m)))


def c1_constant(nu: float, r: float = 0.0, sigma: float = 1.0, k_max: int | None = None):
    """``(c1, k)`` with ``c1 = inf_k (1 - sigma eps_k)**k (eps_{k+1}/eps_k)**(r+nu)``.

    The sequence is monotone in its tail with limit ``exp(-(r+nu))``, so the
    infimum is the smaller of the minimum over ``k <= max(1000, 100 (r+nu))``
    and that limit. ``k`` is None when the limit is the infimum (not attained).
    Raises if ``c1`` falls under ``(sigma eps_1 / e)**(r+nu)``.
    """
    if not (nu > 0 and r >= 0 and sigma > 0):
        raise ValueError("need nu > 0, r >= 0, sigma > 0")
    m = r + nu
    k_hi = k_max if k_max is not None else max(1000, int(100 * m))
    seq = c1_sequence(nu, r, np.arange(k_hi + 1))
    k = int(np.argmin(seq))
    value = float(seq[k])
    if k_max is None and math.exp(-m) < value:
        k, value = None, math.exp(-m)
    floor = (m / (1 + m) / math.e) ** m
    if value < floor * (1 - 1e-12):
        raise ArithmeticError(f"c1={value} below its lower bound {floor}")
    return value, k


def _lw_log_obj(x: SpectralElement, nu: float, r: float, sigma: float):
    keep = x.coefficients != 0
    lam = x.eigenvalues[keep]
    base = np.log(x.weights[keep]) + 2.0 * r * np.log(lam)
    with np.errstate(divide="ignore"):
        step = 2.0 * np.log1p(-sigma * lam)
    m = r + nu
    rows = max(1, 2_000_000 // max(1, lam.size))

    def obj(ks):
        ks = np.atleast_1d(np.asarray(ks, dtype=float))
        out = np.empty(ks.size)
        for a in range(0, ks.size, rows):
            kb = ks[a:a + rows, None]
            with np.errstate(invalid="ignore"):
                terms = base[None, :] + np.where(kb == 0, 0.0, kb * step[None, :])
            out[a:a + rows] = 0.5 * logsumexp(terms, axis=1)
        log_eps = np.log(m / sigma) - np.log(ks + m)
        return out - m * log_eps

    return obj


def landweber_normalized(x: SpectralElement, nu: float, k, r: float = 0.0,
                         sigma: float | None = None):
    """``eps_k**(-(r+nu)) ||(T*T)**r (x_dagger - x_k)||`` with ``eps_k = (r+nu)/(sigma (k+r+nu))``."""
    sigma = 1.0 / x.eigenvalues[-1] if sigma is None else sigma
    _check_tau(x, sigma)
    out = np.exp(_lw_log_obj(x, nu, r, sigma)(k))
    return float(out[0]) if np.ndim(k) == 0 else out


def _check_tau(x, sigma):
    if sigma * x.eigenvalues[-1] > 1.0 + 1e-14:
        raise ValueError(f"sigma * ||T*T|| = {sigma * x.eigenvalues[-1]} exceeds 1")


def delta_rate(x: SpectralElement, nu: float, r: float = 0.0, sigma: float | None = None,
               k_max: int | None = None, rtol: float = 1e-8) -> RateReport:
    """Landweber rate functional ``Delta = sup_k eps_k**(-(r+nu)) ||(T*T)**r (x - x_k)||``.

    Bounds: ``(c1 sqrt(nu/(r+nu)) |||x|||_nu, c2 |||x|||_nu)``. Without ``k_max`` the
    range of k grows tenfold until the running supremum stops increasing.
    """
    if not (nu > 0 and r >= 0):
        raise ValueError("need nu > 0 and r >= 0")
    sigma = 1.0 / x.eigenvalues[-1] if sigma is None else sigma
    _check_tau(x, sigma)
    tn = triple_norm(x, nu).value
    c1, _ = c1_constant(nu, r, sigma)
    c2, _, _ = c2_constant()
    bounds = (c1 * math.sqrt(nu / (r + nu)) * tn, c2 * tn)
    if x.is_zero():
        return RateReport(nu, "landweber", 0.0, 0, bounds, True, r=r)
    value, k, _ = int_sup(_lw_log_obj(x, nu, r, sigma), k_max=k_max)
    ok = leq("lo", bounds[0], value, rtol).passed and leq("hi", value, bounds[1], rtol).passed
    return RateReport(nu, "landweber", value, k, bounds, ok, r=r)


def large_nu_bound_check(x: SpectralElement, k: int, nu: float, r: float = 0.0) -> Report:
    """Fixed-iteration Landweber bound for large smoothness ``nu >= 10 k**2``.

    With ``sigma = 1`` and ``|||x|||_nu`` normalized to one, the bound
    ``eps_k**(r+nu) c2`` is compared with ``c2 exp(-k) (1 + k**2/nu)``, and the
    actual error ``||(T*T)**r (x - x_k)||`` with the bound.
    """
    if nu < 10 * k * k:
        raise ValueError("need nu >= 10 k**2")
    c2 = c2_constant()[0]
    m = r + nu
    bound = c2 * (m / (k + m)) ** m
    rep = Report(values={"bound": bound})
    rep.add(leq("LW.large-nu", bound, c2 * math.exp(-k) * (1 + k * k / nu)))
    if not x.is_zero():
        tn = triple_norm(x, nu).value
        err = landweber_normalized(x, nu, k, r, 1.0) / tn * (m / (k + m)) ** m
        rep.values["error"] = err
        rep.add(leq("LW.large-nu.error", err, bound, 1e-8))
    return rep
