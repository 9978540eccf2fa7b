"""Spectral cut-off, (iterated) Tikhonov and Landweber as spectral filters.

All elements represent ``x_dagger - x_0``; solutions are returned in the same
frame, i.e. as ``x_method - x_0``. Data coefficients live in the shared
eigenbasis: ``y_i = sqrt(lambda_i) * c_i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralElement, SpectralProblem

__all__ = [
    "FilterSpec",
    "NoisyData",
    "cutoff",
    "tikhonov",
    "landweber",
    "error_factor",
    "regularization_error",
    "tikhonov_solve_noisy",
    "landweber_iterate",
    "landweber_run",
    "landweber_residual_element",
    "LandweberRun",
    "landweber_state",
    "default_sigma",
]

KINDS = ("cutoff", "tikhonov", "landweber")


@dataclass(frozen=True)
class FilterSpec:
    """A regularization method and its parameter.

    ``parameter`` is alpha for cut-off and Tikhonov and the iteration index for
    Landweber. ``order`` is the number of Tikhonov sweeps; ``sigma`` the
    Landweber step size.
    """

    kind: str
    parameter: float
    order: int = 1
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}")
        if self.kind == "landweber":
            if self.parameter < 0 or int(self.parameter) != self.parameter:
                raise ValueError("Landweber index must be a nonnegative integer")
            if self.sigma <= 0:
                raise ValueError("step size must be positive")
        elif not self.parameter > 0:
            raise ValueError("alpha must be positive")
        if self.kind == "tikhonov" and (self.order < 1 or int(self.order) != self.order):
            raise ValueError("Tikhonov order must be a positive integer")


def cutoff(alpha: float) -> FilterSpec:
    return FilterSpec("cutoff", alpha)


def tikhonov(alpha: float, k: int = 1) -> FilterSpec:
    return FilterSpec("tikhonov", alpha, order=k)


def landweber(k: int, sigma: float = 1.0) -> FilterSpec:
    return FilterSpec("landweber", k, sigma=sigma)


def _check_step(sigma: float, lam_max: float) -> None:
    if sigma * lam_max > 1.0 + 1e-14:
        raise ValueError(
            f"step size {sigma} times ||T*T|| = {sigma * lam_max} exceeds 1; "
            "the Landweber iterates may diverge"
        )


def _landweber_power(lam, sigma, k):
    """``(1 - sigma lambda)**k`` computed through logs, with ``0**0 = 1``."""
    lam = np.asarray(lam, dtype=float)
    if k == 0:
        return np.ones_like(lam)
    with np.errstate(divide="ignore"):
        return np.exp(k * np.log1p(-sigma * lam))


def error_factor(f: FilterSpec, lam):
    """Spectral factor of ``x_dagger - x_method`` at eigenvalue(s) ``lam``."""
    lam = np.asarray(lam, dtype=float)
    if f.kind == "cutoff":
        out = (lam < f.parameter).astype(float)
    elif f.kind == "tikhonov":
        out = (f.parameter / (f.parameter + lam)) ** f.order
    else:
        _check_step(f.sigma, float(np.max(lam)) if lam.size else 0.0)
        out = _landweber_power(lam, f.sigma, int(f.parameter))
    return out if out.ndim else float(out)


def regularization_error(x: SpectralElement, f: FilterSpec, r: float = 0.0) -> float:
    """``||(T*T)**r (x_dagger - x_method)||`` in the noise-free case."""
    if len(x) == 0:
        return 0.0
    lam = x.eigenvalues
    fac = np.atleast_1d(error_factor(f, lam))
    if r:
        fac = fac * lam**r
    return float(np.sqrt(np.sum(fac**2 * x.weights)))


@dataclass(frozen=True)
class NoisyData:
    """Clean data coefficients, a noise realization and its level."""

    clean: np.ndarray
    noise: np.ndarray
    delta: float

    def __post_init__(self):
        clean = np.asarray(self.clean, dtype=float)
        noise = np.asarray(self.noise, dtype=float)
        if clean.shape != noise.shape:
            raise ValueError("clean data and noise differ in length")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if np.linalg.norm(noise) > self.delta * (1 + 1e-12) + 1e-300:
            raise ValueError("noise norm exceeds delta")
        object.__setattr__(self, "clean", clean)
        object.__setattr__(self, "noise", noise)

    @classmethod
    def exact(cls, p: SpectralProblem) -> "NoisyData":
        y = p.clean_data()
        return cls(y, np.zeros_like(y), 0.0)

    @property
    def observed(self) -> np.ndarray:
        return self.clean + self.noise


def tikhonov_solve_noisy(p: SpectralProblem, d: NoisyData, alpha: float, k: int = 1) -> SpectralElement:
    """k-fold iterated Tikhonov with noisy data; returns ``x_{alpha,k} - x_0``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if k < 1:
        raise ValueError("k must be a positive integer")
    lam = p.eigenvalues
    data = d.observed / np.sqrt(lam)
    prev = np.zeros_like(lam)
    for _ in range(k):
        prev = (lam * data + alpha * prev) / (lam + alpha)
    return p.element.with_coefficients(prev)


def landweber_iterate(p: SpectralProblem, d: NoisyData, sigma: float, k: int) -> SpectralElement:
    """Run the Landweber recurrence literally for ``k`` steps; returns ``x_k - x_0``."""
    lam = p.eigenvalues
    _check_step(sigma, lam[-1])
    root = np.sqrt(lam)
    x = np.zeros_like(lam)
    y = d.observed
    for _ in range(k):
        x = x + sigma * root * (y - root * x)
    return p.element.with_coefficients(x)


def landweber_residual_element(x: SpectralElement, sigma: float, k: int) -> SpectralElement:
    """Noise-free ``x_dagger - x_k``, e.g. to reuse an iterate as the prior."""
    _check_step(sigma, x.eigenvalues[-1])
    return x.with_coefficients(_landweber_power(x.eigenvalues, sigma, k) * x.coefficients)


@dataclass(frozen=True)
class LandweberRun:
    ks: np.ndarray
    errors: np.ndarray
    residuals: np.ndarray


def _landweber_closed(p, d, sigma, ks):
    lam = p.eigenvalues
    root = np.sqrt(lam)
    c = p.element.coefficients
    res0 = d.observed
    errs, ress = [], []
    for k in ks:
        q = _landweber_power(lam, sigma, int(k))
        if k == 0:
            gain = np.zeros_like(lam)
        else:
            with np.errstate(divide="ignore"):
                gain = -np.expm1(k * np.log1p(-sigma * lam))
        err = c - gain * res0 / root
        errs.append(float(np.linalg.norm(err)))
        ress.append(float(np.linalg.norm(q * res0)))
    return np.array(errs), np.array(ress)


def landweber_run(p: SpectralProblem, d: NoisyData, sigma: float | None = None,
                  k_max: int = 100) -> LandweberRun:
    """Errors ``||x_dagger - x_k||`` and residuals ``||y - T x_k||`` for ``k = 0..k_max``.

    Uses the closed filtered form ``y - T x_k = (1 - sigma lambda)**k (y - T x_0)``.
    """
    lam = p.eigenvalues
    sigma = default_sigma(p) if sigma is None else sigma
    _check_step(sigma, lam[-1])
    ks = np.arange(k_max + 1)
    errs, ress = _landweber_closed(p, d, sigma, ks)
    return LandweberRun(ks, errs, ress)


def landweber_state(p: SpectralProblem, d: NoisyData, sigma: float, k: int):
    """``(error, residual)`` at a single iteration index."""
    errs, ress = _landweber_closed(p, d, sigma, [k])
    return float(errs[0]), float(ress[0])


def default_sigma(p) -> float:
    """The largest admissible step, ``1 / ||T*T||``."""
    return 1.0 / float(getattr(p, "operator_norm_sq", p.eigenvalues[-1]))

