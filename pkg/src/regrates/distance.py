"""Distance function of an element to balls of the smoother space X_gamma.

``d(r) = inf { ||x - x1|| : ||x1||_gamma <= r }``. Below ``r = ||x||_gamma`` the
constraint is active and the minimizer is the Tikhonov-type filter
``x1_i = u_i/(u_i + beta) x_i`` with ``u_i = lambda_i**(2 gamma)``; the
multiplier ``beta`` is found by root bracketing on the monotone constraint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .checks import Report, close, leq
from .interp import hilbert_norm, interp_norm, k_functional, n_theta
from .search import log_inf, log_sup
from .spectral import SpectralElement

__all__ = [
    "DistanceProfile",
    "distance",
    "distance_profile",
    "conjugate_equivalence_check",
    "d_e_identity",
]


def _parts(x: SpectralElement, gamma: float):
    keep = x.coefficients != 0
    lam, w = x.eigenvalues[keep], x.weights[keep]
    return lam ** (2.0 * gamma), w


def _r_sq(u, w, beta):
    return float(np.sum(u * w / (u + beta) ** 2))


def _d_sq(u, w, beta):
    return float(np.sum(w / (1.0 + u / beta) ** 2))


def distance(x: SpectralElement, r: float, gamma: float) -> tuple[float, float]:
    """``(d(r), beta)`` where ``beta`` is the multiplier attaining it.

    ``beta`` is ``inf`` at ``r = 0`` and ``0`` once ``r >= ||x||_gamma``.
    """
    if r < 0 or gamma <= 0:
        raise ValueError("need r >= 0 and gamma > 0")
    u, w = _parts(x, gamma)
    if u.size == 0:
        return 0.0, 0.0
    if r == 0:
        return x.norm(), math.inf
    if r * r >= float(np.sum(w / u)) * (1.0 - 1e-13):
        return 0.0, 0.0

    target = 2.0 * math.log(r)

    def h(s):
        return math.log(_r_sq(u, w, math.exp(s))) - target

    lo = math.log(u[0]) - 2.0
    for _ in range(64):
        if h(lo) > 0:
            break
        lo -= 8.0
    else:
        return 0.0, 0.0
    hi = math.log(u[-1]) + 2.0
    while h(hi) >= 0:
        hi += 8.0
    s = brentq(h, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)
    beta = math.exp(s)
    return math.sqrt(_d_sq(u, w, beta)), beta


@dataclass(frozen=True)
class DistanceProfile:
    element: SpectralElement
    gamma: float
    samples: tuple  # of (r, d, beta)

    def r(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    def d(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    def beta(self) -> np.ndarray:
        return np.array([s[2] for s in self.samples])


def distance_profile(x: SpectralElement, gamma: float, rs) -> DistanceProfile:
    rs = np.sort(np.asarray(rs, dtype=float))
    return DistanceProfile(x, gamma, tuple((float(r), *distance(x, r, gamma)) for r in rs))


def _beta_range(u, extra=()):
    vals = [u[0], u[-1], *extra]
    return min(vals) * 1e-8, max(vals) * 1e8


def conjugate_equivalence_check(x: SpectralElement, gamma: float, t: float,
                                rtol: float = 1e-8) -> Report:
    """Compare K_t with the two infimal forms built from the distance function.

    ``A = inf_r (d(r)**2 + t**2 r**2)**(1/2)`` must equal ``K_t`` and
    ``B = inf_r (d(r) + t r) = -d*(-t)`` must lie in ``[A, sqrt(2) A]``.
    The infima run over the multiplier ``beta``, which parametrizes ``r``
    monotonically on ``(0, ||x||_gamma)``; both endpoints are included.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    u, w = _parts(x, gamma)
    kt = k_functional(x, gamma, t)
    if u.size == 0:
        rep = Report(values={"A": 0.0, "B": 0.0, "K": kt})
        rep.add(close("conjugate.A=K", 0.0, kt, 0.0, 1e-300))
        return rep
    norm0, norm_g = x.norm(), hilbert_norm(x, gamma)

    def log_a(s):
        out = np.empty(np.size(s))
        for i, si in enumerate(np.atleast_1d(s)):
            b = math.exp(si)
            out[i] = 0.5 * math.log(_d_sq(u, w, b) + t * t * _r_sq(u, w, b))
        return out

    def log_b(s):
        out = np.empty(np.size(s))
        for i, si in enumerate(np.atleast_1d(s)):
            b = math.exp(si)
            out[i] = math.log(math.sqrt(_d_sq(u, w, b)) + t * math.sqrt(_r_sq(u, w, b)))
        return out

    lo, hi = _beta_range(u, (t * t,))
    a = min(log_inf(log_a, lo, hi).value, norm0, t * norm_g)
    b = min(log_inf(log_b, lo, hi).value, norm0, t * norm_g)
    rep = Report(values={"A": a, "B": b, "K": kt})
    rep.add(close("conjugate.A=K", a, kt, rtol))
    rep.add(leq("conjugate.A<=B", a, b, rtol))
    rep.add(leq("conjugate.B<=sqrt2A", b, math.sqrt(2.0) * a, rtol))
    return rep


def d_e_identity(x: SpectralElement, theta: float, gamma: float, rtol: float = 1e-4) -> Report:
    """Check ``D = E = N_theta**(-1) ||x||_{theta gamma : gamma}``.

    ``D = sup_r d(r)**(1-theta) r**theta`` is taken over a logarithmic grid in
    ``r`` with ``d(r)`` solved for each ``r``. ``E`` takes the inner infimum on
    the sphere ``||x1||_gamma = r``, realized by the same multiplier family,
    and is maximized directly over ``beta``.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must lie strictly between 0 and 1")
    if x.is_zero():
        raise ValueError("x must be nonzero")
    u, w = _parts(x, gamma)
    norm_g = hilbert_norm(x, gamma)

    def log_d_obj(s):
        out = np.empty(np.size(s))
        for i, si in enumerate(np.atleast_1d(s)):
            r = math.exp(si)
            d, _ = distance(x, r, gamma)
            out[i] = (1 - theta) * math.log(d) + theta * si if d > 0 else -math.inf
        return out

    def log_e_obj(s):
        out = np.empty(np.size(s))
        for i, si in enumerate(np.atleast_1d(s)):
            b = math.exp(si)
            out[i] = 0.5 * ((1 - theta) * math.log(_d_sq(u, w, b))
                            + theta * math.log(_r_sq(u, w, b)))
        return out

    big_d = log_sup(log_d_obj, norm_g * 1e-8, norm_g).value
    lo, hi = _beta_range(u)
    big_e = log_sup(log_e_obj, lo, hi).value
    target = interp_norm(x, theta * gamma, gamma).value / n_theta(theta)
    rep = Report(values={"D": big_d, "E": big_e, "target": target})
    rep.add(close("D=E.D", big_d, target, rtol))
    rep.add(close("D=E.E", big_e, target, rtol))
    return rep
