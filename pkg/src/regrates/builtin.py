"""Concrete spectral problems: a diagonal operator, Dirac atoms, power laws and a BVP."""
from __future__ import annotations

import re
from dataclasses import dataclass

import mpmath
import numpy as np

from .spectral import SpectralElement, SpectralProblem

__all__ = [
    "ExampleId",
    "diag_example",
    "dirac",
    "powerlaw",
    "bvp_sign",
    "bvp_coefficient",
    "build",
]


def diag_example(n: int) -> SpectralProblem:
    """``lambda_n = 1/n`` and ``c_n = n**(-3/2)`` for ``n = 1..N``.

    Atoms are stored in increasing eigenvalue order, i.e. ``n = N`` first.
    """
    _check_count(n, 1, "N")
    idx = np.arange(n, 0, -1, dtype=float)
    x = SpectralElement(1.0 / idx, idx**-1.5)
    return SpectralProblem(x, label=f"diag_example({n})")


def dirac(lam0: float = 1.0) -> SpectralProblem:
    """A single atom at ``lam0`` with unit coefficient."""
    if not lam0 > 0:
        raise ValueError("lam0 must be positive")
    return SpectralProblem(SpectralElement([lam0], [1.0]), label=f"dirac({lam0!r})")


def powerlaw(nu: float, atoms: int) -> SpectralProblem:
    """Equal-mass discretization of ``2 nu lambda**(2 nu - 1) d lambda`` on (0, 1].

    Cell ``j`` spans ``[((j-1)/M)**(1/(2 nu)), (j/M)**(1/(2 nu))]``, carries mass
    ``1/M`` and is represented by an atom at its mass centroid.
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    _check_count(atoms, 2, "atoms")
    m = atoms
    b = (np.arange(m + 1) / m) ** (1.0 / (2.0 * nu))
    p = 2.0 * nu + 1.0
    lam = m * (2.0 * nu / p) * np.diff(b**p)
    x = SpectralElement(lam, np.full(m, np.sqrt(1.0 / m)))
    return SpectralProblem(x, label=f"powerlaw({nu!r},{atoms})")


def bvp_coefficient(n: int, dps: int = 40) -> float:
    """``int_{-1}^{1} sign(s) sin(n pi (s+1)/2) ds`` from the exact antiderivative.

    With ``w = n pi/2`` this is ``(2 cos w - cos 2w - 1)/w``; the cosines are
    evaluated at rational multiples of pi, so vanishing terms are exact zeros.
    """
    _check_count(n, 1, "n")
    with mpmath.workdps(dps):
        half = mpmath.mpf(n) / 2
        num = 2 * mpmath.cospi(half) - mpmath.cospi(n) - 1
        return float(num / (mpmath.pi * half))


def bvp_sign(n: int) -> SpectralProblem:
    """Expansion of ``sign(s)`` in the Dirichlet eigenfunctions on (-1, 1).

    The eigenfunctions ``sin(n pi (s+1)/2)`` are orthonormal on (-1, 1) and
    ``T*T`` has eigenvalues ``(2/(n pi))**2`` for ``n = 1..N``.
    """
    _check_count(n, 1, "N")
    idx = np.arange(n, 0, -1)
    lam = (2.0 / (idx * np.pi)) ** 2
    coef = np.array([bvp_coefficient(int(i)) for i in idx])
    return SpectralProblem(SpectralElement(lam, coef), label=f"bvp_sign({n})")


def _check_count(n, least, name):
    if int(n) != n or n < least:
        raise ValueError(f"{name} must be an integer >= {least}, got {n!r}")


_BUILDERS = {
    "diag_example": (diag_example, (int,)),
    "dirac": (dirac, (float,)),
    "powerlaw": (powerlaw, (float, int)),
    "bvp_sign": (bvp_sign, (int,)),
}

_ID = re.compile(r"^\s*([a-z_]+)\s*\(([^()]*)\)\s*$")


@dataclass(frozen=True)
class ExampleId:
    """Name and parameters of a built-in example, e.g. ``powerlaw(0.5, 10000)``."""

    name: str
    params: tuple

    def __post_init__(self):
        if self.name not in _BUILDERS:
            raise ValueError(f"unknown example {self.name!r}; expected one of {sorted(_BUILDERS)}")
        kinds = _BUILDERS[self.name][1]
        if len(self.params) != len(kinds):
            raise ValueError(f"{self.name} takes {len(kinds)} parameter(s), got {len(self.params)}")
        try:
            params = tuple(k(v) if k is float else _as_int(v) for k, v in zip(kinds, self.params))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"bad parameters for {self.name}: {exc}") from None
        object.__setattr__(self, "params", params)

    @classmethod
    def parse(cls, text: str) -> "ExampleId":
        m = _ID.match(text)
        if not m:
            raise ValueError(f"cannot parse example id {text!r}")
        args = [a.strip() for a in m.group(2).split(",") if a.strip()]
        return cls(m.group(1), tuple(float(a) for a in args))

    def build(self) -> SpectralProblem:
        return _BUILDERS[self.name][0](*self.params)

    def __str__(self) -> str:
        return f"{self.name}({','.join(repr(p) for p in self.params)})"


def _as_int(v):
    if float(v) != int(float(v)):
        raise ValueError(f"{v!r} is not an integer")
    return int(float(v))


def build(example) -> SpectralProblem:
    """Build from an :class:`ExampleId` or its string form."""
    if isinstance(example, str):
        example = ExampleId.parse(example)
    return example.build()
