"""Suprema of smooth positive functions over (0, inf) and over iteration counts.

The objectives met in this package are sums of terms that are log-concave in
``log t`` but the sum need not be unimodal, so every grid-local maximum is
refined, not only the best one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["SupResult", "golden_max", "log_sup", "log_inf", "int_sup"]

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
POINTS_PER_DECADE = 64
REFINE_TOL = 1e-10
_LN10 = math.log(10.0)


@dataclass(frozen=True)
class SupResult:
    """A located supremum.

    ``grid`` is ``(log10_lo, log10_hi, points, refinements)``; ``converged`` is
    false when the best grid value sat on an edge even after extension.
    """

    value: float
    arg_sup: float
    grid: tuple
    converged: bool

    def __float__(self) -> float:
        return self.value


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float = REFINE_TOL):
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _grid(lo, hi, ppd):
    n = max(int(math.ceil((hi - lo) * ppd)) + 1, 3)
    return np.linspace(lo, hi, n)


def log_sup(
    log_objective: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    ppd: int = POINTS_PER_DECADE,
    tol: float = REFINE_TOL,
    extend: int = 8,
    max_refine: int = 64,
) -> SupResult:
    """Supremum over ``t in (0, inf)`` of ``exp(log_objective(log t))``.

    ``log_objective`` is vectorized over natural-log abscissae. The grid spans
    ``[lo, hi]`` with ``ppd`` points per decade and is widened by four decades
    on any side where the maximum lands on the edge, at most ``extend`` times.
    """
    a, b = math.log(lo), math.log(hi)
    step = _LN10 / ppd
    for _ in range(extend + 1):
        u = _grid(a, b, ppd / _LN10)
        v = np.asarray(log_objective(u), dtype=float)
        v = np.where(np.isnan(v), -np.inf, v)
        i = int(np.argmax(v))
        if i == 0 and np.isfinite(v[0]) and v[0] > v[1] - 1e-15:
            a -= 4 * _LN10
        elif i == u.size - 1 and np.isfinite(v[-1]) and v[-1] > v[-2] - 1e-15:
            b += 4 * _LN10
        else:
            break
    else:
        i = int(np.argmax(v))
        return SupResult(float(np.exp(v[i])), float(np.exp(u[i])),
                         (a / _LN10, b / _LN10, u.size, 0), False)

    if not np.isfinite(v[i]):
        return SupResult(0.0, float(np.exp(u[i])), (a / _LN10, b / _LN10, u.size, 0), True)

    interior = np.arange(1, u.size - 1)
    peaks = interior[(v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])]
    if peaks.size > max_refine:
        peaks = peaks[np.argsort(v[peaks])[-max_refine:]]

    def f(s):
        return float(log_objective(np.array([s]))[0])

    best_u, best_v = u[i], v[i]
    for j in peaks:
        s, fs = golden_max(f, u[j] - step, u[j] + step, tol)
        if fs > best_v:
            best_u, best_v = s, fs
    return SupResult(float(np.exp(best_v)), float(np.exp(best_u)),
                     (a / _LN10, b / _LN10, u.size, int(peaks.size)), True)


def log_inf(log_objective, lo, hi, **kw) -> SupResult:
    """Infimum counterpart of :func:`log_sup` (``value`` is the infimum)."""
    res = log_sup(lambda u: -np.asarray(log_objective(u)), lo, hi, **kw)
    return SupResult(1.0 / res.value if res.value > 0 else math.inf,
                     res.arg_sup, res.grid, res.converged)


def _int_grid(k_lo: int, k_hi: int, dense: int, ppd: int) -> np.ndarray:
    head = np.arange(k_lo, min(k_hi, dense) + 1)
    if k_hi <= dense:
        return head
    tail = np.unique(np.round(np.logspace(math.log10(dense), math.log10(k_hi),
                                          int(ppd * math.log10(k_hi / dense)) + 2)))
    return np.unique(np.concatenate([head, tail.astype(np.int64)]))


def int_sup(
    log_objective: Callable[[np.ndarray], np.ndarray],
    k_max: int | None = None,
    k_start: int = 1000,
    rtol: float = 1e-9,
    k_limit: int = 10**12,
    dense: int = 64,
    ppd: int = POINTS_PER_DECADE,
) -> tuple[float, int, int]:
    """Supremum over integers ``k >= 0`` of ``exp(log_objective(k))``.

    With ``k_max`` given the range is ``[0, k_max]``. Otherwise the range
    starts at ``[0, k_start]`` and grows tenfold until the running supremum
    stops increasing (relative ``rtol``) over the newly added decade.

    Integers up to ``dense`` are all evaluated, beyond that a logarithmic
    integer grid is used and each local maximum is refined by integer
    golden-section search between its grid neighbours.

    Returns ``(value, argmax, k_max_used)``.
    """

    def scan(k_hi):
        ks = _int_grid(0, k_hi, dense, ppd)
        v = np.asarray(log_objective(ks.astype(float)), dtype=float)
        v = np.where(np.isnan(v), -np.inf, v)
        best = int(np.argmax(v))
        best_k, best_v = int(ks[best]), float(v[best])
        peaks = [j for j in range(1, ks.size - 1)
                 if v[j] > v[j - 1] and v[j] >= v[j + 1] and ks[j + 1] - ks[j - 1] > 2]
        for j in peaks:
            k, fk = _int_golden(log_objective, int(ks[j - 1]), int(ks[j + 1]))
            if fk > best_v:
                best_k, best_v = k, fk
        return best_v, best_k

    if k_max is not None:
        v, k = scan(int(k_max))
        return math.exp(v), k, int(k_max)

    k_hi = k_start
    v, k = scan(k_hi)
    while k_hi < k_limit:
        k_next = k_hi * 10
        v2, k2 = scan(k_next)
        if v2 <= v + math.log1p(rtol):
            return math.exp(max(v, v2)), (k if v >= v2 else k2), k_next
        v, k, k_hi = v2, k2, k_next
    return math.exp(v), k, k_hi


def _int_golden(log_objective, a: int, b: int):
    def f(k):
        return float(log_objective(np.array([float(k)]))[0])

    cache = {}

    def g(k):
        if k not in cache:
            cache[k] = f(k)
        return cache[k]

    while b - a > 3:
        c = int(round(b - INVPHI * (b - a)))
        d = int(round(a + INVPHI * (b - a)))
        if c >= d:
            d = c + 1
        if g(c) >= g(d):
            b = d
        else:
            a = c
    k = max(range(a, b + 1), key=g)
    return k, g(k)
