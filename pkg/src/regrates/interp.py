"""Hilbert-scale, triple and interpolation norms of spectral elements.

Notation: for an element with atoms ``(lambda_i, c_i)`` and ``gamma > 0``,

* ``||x||_gamma**2 = sum lambda_i**(-2 gamma) c_i**2``,
* ``|||x|||_nu = sup_t t**(-nu) ||E_[0,t) x||``,
* ``K_t(x)**2 = sum t**2 / (t**2 + lambda_i**(2 gamma)) c_i**2``,
* ``||x||_{nu:gamma} = sup_t t**(-nu/gamma) K_t(x)``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .checks import Report, leq
from .search import SupResult, log_sup
from .spectral import DiscreteSpectralMeasure, SpectralElement, operator_norm

__all__ = [
    "n_theta",
    "hilbert_norm",
    "triple_norm",
    "k_functional",
    "interp_norm",
    "sandwich_report",
    "tail_bound_check",
    "variational_sup",
    "young_check",
    "commutation_check",
    "interpolation_inequality_check",
]

# Bound on grid-by-atom matrix size when evaluating objectives.
_CHUNK = 2_000_000


def n_theta(theta: float) -> float:
    """N_theta = (theta**theta (1-theta)**(1-theta))**(-1/2), with 0**0 = 1."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta={theta} outside [0, 1]")
    s = 0.0
    if 0.0 < theta:
        s += theta * math.log(theta)
    if theta < 1.0:
        s += (1.0 - theta) * math.log1p(-theta)
    return math.exp(-0.5 * s)


def _as_measure(x) -> DiscreteSpectralMeasure:
    if isinstance(x, DiscreteSpectralMeasure):
        return x
    return x.measure


def hilbert_norm(x: SpectralElement, gamma: float) -> float:
    """||x||_gamma = ||(T*T)**(-gamma) x||."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if len(x) == 0:
        return 0.0
    if gamma == 0:
        return x.norm()
    return float(np.sqrt(np.sum(x.eigenvalues ** (-2.0 * gamma) * x.weights)))


def triple_norm(x, nu: float) -> SupResult:
    """|||x|||_nu computed exactly from prefix sums of the spectral measure.

    For atomic measures the supremum of ``t**(-2nu) mu([0, t))`` is approached
    as ``t`` decreases to an atom, so it equals the largest
    ``lambda_i**(-2nu) mu([0, lambda_i])``.
    """
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    mu = _as_measure(x)
    lam = mu.eigenvalues
    if lam.size == 0:
        return SupResult(0.0, 1.0, (0.0, 0.0, 0, 0), True)
    grid = (math.log10(lam[0]), math.log10(lam[-1]), lam.size, 0)
    prefix = mu.prefix_mass()
    with np.errstate(divide="ignore"):
        vals = np.log(prefix) - 2.0 * nu * np.log(lam)
    i = int(np.argmax(vals))
    if not np.isfinite(vals[i]):
        return SupResult(0.0, float(lam[-1]), grid, True)
    return SupResult(float(np.exp(0.5 * vals[i])), float(lam[i]), grid, True)


def _log_k_sq(u_log: np.ndarray, log_w: np.ndarray, s: np.ndarray) -> np.ndarray:
    """log K_t**2 at ``t = exp(s)`` with ``u_log = log lambda**(2 gamma)``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty(s.size)
    rows = max(1, _CHUNK // max(1, u_log.size))
    for a in range(0, s.size, rows):
        blk = s[a:a + rows, None]
        terms = log_w[None, :] - np.logaddexp(0.0, u_log[None, :] - 2.0 * blk)
        out[a:a + rows] = logsumexp(terms, axis=1)
    return out


def _support(x: SpectralElement):
    keep = x.coefficients != 0
    return x.eigenvalues[keep], x.weights[keep]


def k_functional(x: SpectralElement, gamma: float, t: float) -> float:
    """K_t for the pair (X, X_gamma)."""
    if not (t > 0 and gamma > 0):
        raise ValueError("t and gamma must be positive")
    lam, w = _support(x)
    if lam.size == 0:
        return 0.0
    v = _log_k_sq(2.0 * gamma * np.log(lam), np.log(w), math.log(t))[0]
    return float(np.exp(0.5 * v))


def interp_norm(x: SpectralElement, nu: float, gamma: float) -> SupResult:
    """||x||_{nu:gamma} = sup_t t**(-nu/gamma) K_t(x)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not 0 <= nu <= gamma:
        raise ValueError(f"need 0 <= nu <= gamma, got nu={nu}, gamma={gamma}")
    lam, w = _support(x)
    if lam.size == 0:
        return SupResult(0.0, 1.0, (0.0, 0.0, 0, 0), True)
    if nu == 0:
        return SupResult(x.norm(), math.inf, (0.0, 0.0, 0, 0), True)
    if nu == gamma:
        return SupResult(hilbert_norm(x, gamma), 0.0, (0.0, 0.0, 0, 0), True)
    u_log = 2.0 * gamma * np.log(lam)
    log_w = np.log(w)
    theta = nu / gamma

    def obj(s):
        return 0.5 * _log_k_sq(u_log, log_w, s) - theta * s

    lo = lam[0] ** gamma * 1e-4
    hi = lam[-1] ** gamma * 1e4
    return log_sup(obj, lo, hi)


def sandwich_report(x: SpectralElement, nu: float, gamma: float, rtol: float = 1e-8) -> Report:
    """Evaluate the embedding chain between the spaces X_gamma, X_nu and X_{nu:gamma}.

    ``values["chain"]`` holds, in order,
    ``sqrt(1 - nu/gamma) ||x||_{nu:gamma}``, ``|||x|||_nu``,
    ``N_{nu/gamma} ||x||_{nu:gamma}``, ``||x||_nu`` and
    ``||T*T||**(gamma-nu) ||x||_gamma``; each must not exceed the next.
    ``values["equiv"]`` holds ``(|||x|||/sqrt2, ||x||_{nu:2nu}, sqrt2 |||x|||)``.
    """
    if not 0 <= nu < gamma:
        raise ValueError("need 0 <= nu < gamma")
    ip = interp_norm(x, nu, gamma).value
    tn = triple_norm(x, nu).value
    theta = nu / gamma
    chain = (
        math.sqrt(1.0 - theta) * ip,
        tn,
        n_theta(theta) * ip,
        hilbert_norm(x, nu),
        operator_norm(x) ** (gamma - nu) * hilbert_norm(x, gamma) if len(x) else 0.0,
    )
    rep = Report(values={"chain": chain})
    for name, a, b in zip("abcd", chain[:-1], chain[1:]):
        rep.add(leq(f"chain.{name}", a, b, rtol))
    if nu > 0:
        ip2 = interp_norm(x, nu, 2 * nu).value
        equiv = (tn / math.sqrt(2.0), ip2, math.sqrt(2.0) * tn)
        rep.values["equiv"] = equiv
        rep.add(leq("equiv.lower", equiv[0], equiv[1], rtol))
        rep.add(leq("equiv.upper", equiv[1], equiv[2], rtol))
    return rep


def tail_bound_check(mu, nu: float, gamma: float, r: float, cap: float, rtol: float = 1e-10) -> Report:
    """Both tail estimates of the measure lemma at ``Lambda = cap``.

    * ``mu([0,L)) + L**(2g) int_[L,inf) l**(-2g) dmu <= g/(g-nu) L**(2nu) |||mu|||_nu**2``
    * ``int_[0,L) l**(-2r) dmu <= (r+nu)/nu L**(2nu) |||mu|||_{r+nu}**2``
    """
    if not (gamma > nu > 0 and cap > 0 and r >= 0):
        raise ValueError("need gamma > nu > 0, r >= 0, Lambda > 0")
    mu = _as_measure(mu)
    lam, w = mu.eigenvalues, mu.weights
    below = lam < cap
    lhs2 = np.sum(w[below]) + np.sum((cap / lam[~below]) ** (2 * gamma) * w[~below])
    rhs2 = gamma / (gamma - nu) * cap ** (2 * nu) * triple_norm(mu, nu).value ** 2
    lhs1 = np.sum(lam[below] ** (-2 * r) * w[below])
    rhs1 = (r + nu) / nu * cap ** (2 * nu) * triple_norm(mu, r + nu).value ** 2
    rep = Report(values={"tail.split": (lhs2, rhs2), "tail.moment": (lhs1, rhs1)})
    rep.add(leq("tail.split", lhs2, rhs2, rtol))
    rep.add(leq("tail.moment", lhs1, rhs1, rtol))
    return rep


def young_check(a: float, b: float, theta: float, rtol: float = 1e-12):
    """``N_theta**2 a**(1-theta) b**theta <= a + b``; returns a check."""
    lhs = n_theta(theta) ** 2 * a ** (1 - theta) * b**theta
    return leq("young", lhs, a + b, rtol)


def commutation_check(lam: float, t: float, k: float, theta: float, rtol: float = 1e-10):
    """``N_theta**(2(1-2k)) t**(2(1-theta))/(t**2+lam**(2k)) <= (alpha**(1-theta)/(alpha+lam))**(2k)``.

    ``alpha = t**(1/k) ((1-theta)/theta)**(1-1/(2k))``; needs ``0 < theta < 1``.
    Compared on a log scale.
    """
    if not (0 < theta < 1 and k >= 0.5 and t > 0 and lam >= 0):
        raise ValueError("need 0 < theta < 1, k >= 1/2, t > 0, lam >= 0")
    alpha = t ** (1 / k) * ((1 - theta) / theta) ** (1 - 1 / (2 * k))
    lhs = (2 * (1 - 2 * k) * math.log(n_theta(theta)) + 2 * (1 - theta) * math.log(t)
           - math.log(t**2 + lam ** (2 * k)))
    rhs = 2 * k * ((1 - theta) * math.log(alpha) - math.log(alpha + lam))
    return leq("commutation", lhs, rhs, 0.0, rtol * max(1.0, abs(rhs)))


def interpolation_inequality_check(x: SpectralElement, omega, nu: float, gamma: float,
                                   rtol: float = 1e-8):
    """``|<x, w>| <= N_{nu/gamma} ||x||_{nu:gamma} ||(T*T)**gamma w||**(nu/gamma)`` for unit ``w``.

    ``omega`` holds coefficients on the atoms of ``x``; it is normalized here.
    """
    omega = np.asarray(omega, dtype=float)
    omega = omega / np.linalg.norm(omega)
    lhs = abs(float(np.dot(x.coefficients, omega)))
    th = nu / gamma
    smooth = float(np.linalg.norm(x.eigenvalues**gamma * omega))
    rhs = n_theta(th) * interp_norm(x, nu, gamma).value * smooth**th
    return leq("interp-inequality", lhs, rhs, rtol)


def _svi_objective(log_c, log_u, theta):
    """Negative log objective in log-magnitudes ``z`` with ``w = sign(c) exp(z)``.

    Only ``<c, w>`` sees the signs of ``w``, so aligning them with ``c`` loses
    nothing; in ``z`` the objective is a difference of log-sum-exps.
    """

    def fun(z):
        a, b, d = z + log_c, 2 * z + log_u, 2 * z
        la, lb, ld = logsumexp(a), logsumexp(b), logsumexp(d)
        val = la - 0.5 * theta * lb - 0.5 * (1 - theta) * ld
        grad = np.exp(a - la) - theta * np.exp(b - lb) - (1 - theta) * np.exp(d - ld)
        return -val, -grad

    return fun


def variational_sup(x: SpectralElement, nu: float, gamma: float, starts: int = 32,
                    seed: int = 0) -> SupResult:
    """Lower bound for ``sup_{||w||=1} ||(T*T)**gamma w||**(-nu/gamma) |<x, w>|``.

    Quasi-Newton ascent over directions spanned by the atoms of ``x``,
    parametrized by log-magnitudes with signs matched to ``x``; every iterate
    is a feasible direction, so the returned value is attained. The
    theoretical supremum is ``N_{nu/gamma} ||x||_{nu:gamma}``; its value and the
    relative gap are in ``grid = (target, gap, starts, 0)``.
    """
    if x.is_zero():
        raise ValueError("x must be nonzero")
    if not 0 <= nu <= gamma:
        raise ValueError("need 0 <= nu <= gamma")
    lam, _ = _support(x)
    c = x.coefficients[x.coefficients != 0]
    theta = nu / gamma
    # rescaling T*T only rescales the objective
    scale = lam[-1]

    rng = np.random.default_rng(seed)
    log_c = np.log(np.abs(c))
    log_lam = np.log(lam / scale)
    fun = _svi_objective(log_c, 2 * gamma * log_lam, theta)
    dominant = np.full(c.size, -30.0)
    dominant[np.argmax(np.abs(c))] = 0.0
    inits = [log_c, dominant, log_c - 2 * nu * log_lam]
    inits += [rng.normal(0.0, 3.0, c.size) for _ in range(starts)]
    best_f = -math.inf
    for z0 in inits:
        res = minimize(fun, z0, jac=True, method="L-BFGS-B",
                       options={"maxiter": 5000, "ftol": 1e-15, "gtol": 1e-13})
        if -res.fun > best_f:
            best_f, best_z = -res.fun, res.x
    best_w = np.exp(best_z - best_z.max())
    best_w /= np.linalg.norm(best_w)
    val = math.exp(best_f) * scale ** (-nu)
    target = n_theta(theta) * interp_norm(x, nu, gamma).value
    gap = (target - val) / target
    return SupResult(val, float(np.dot(lam, best_w**2)), (target, gap, len(inits), 0), True)
