"""Elements and measures expressed in the eigenbasis of T*T.

Everything downstream works on finitely many atoms ``(lambda_i, c_i)`` with
strictly increasing, strictly positive eigenvalues. The induced spectral
measure has weights ``c_i**2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpectralElement",
    "DiscreteSpectralMeasure",
    "SpectralProblem",
    "measure_from_atoms",
    "project_below",
    "apply_power",
    "operator_norm",
    "MERGE_RTOL",
]

# Eigenvalues closer than this (relative) are treated as one spectral level.
MERGE_RTOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float).reshape(-1)
    a.setflags(write=False)
    return a


def _check_sorted(lam: np.ndarray) -> None:
    if lam.size and lam[0] <= 0:
        raise ValueError(
            "eigenvalues must be positive: T is assumed injective, so the "
            "spectral measure carries no mass at 0"
        )
    if lam.size > 1 and np.any(np.diff(lam) <= 0):
        raise ValueError("eigenvalues must be strictly increasing")


@dataclass(frozen=True)
class SpectralElement:
    """An element of X written in the eigenbasis of T*T.

    Attributes
    ----------
    eigenvalues : ndarray
        Strictly increasing positive eigenvalues.
    coefficients : ndarray
        Signed coefficients, one per eigenvalue.
    """

    eigenvalues: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        lam = _frozen(self.eigenvalues)
        c = _frozen(self.coefficients)
        if lam.shape != c.shape:
            raise ValueError("eigenvalues and coefficients differ in length")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(c))):
            raise ValueError("atoms must be finite")
        _check_sorted(lam)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def zero(cls) -> "SpectralElement":
        return cls(np.empty(0), np.empty(0))

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def weights(self) -> np.ndarray:
        return self.coefficients**2

    @property
    def measure(self) -> "DiscreteSpectralMeasure":
        return DiscreteSpectralMeasure(self.eigenvalues, self.weights)

    def norm_sq(self) -> float:
        return float(np.sum(self.weights))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    def with_coefficients(self, coefficients) -> "SpectralElement":
        """Same eigenvalues, new coefficients."""
        return SpectralElement(self.eigenvalues, coefficients)

    def __sub__(self, other: "SpectralElement") -> "SpectralElement":
        if not np.array_equal(self.eigenvalues, other.eigenvalues):
            raise ValueError("elements live on different spectral supports")
        return self.with_coefficients(self.coefficients - other.coefficients)

    def __add__(self, other: "SpectralElement") -> "SpectralElement":
        if not np.array_equal(self.eigenvalues, other.eigenvalues):
            raise ValueError("elements live on different spectral supports")
        return self.with_coefficients(self.coefficients + other.coefficients)

    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.eigenvalues.tolist(), self.coefficients.tolist()))


@dataclass(frozen=True)
class DiscreteSpectralMeasure:
    """Finite atomic measure on (0, inf) with nonnegative weights."""

    eigenvalues: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        lam = _frozen(self.eigenvalues)
        w = _frozen(self.weights)
        if lam.shape != w.shape:
            raise ValueError("eigenvalues and weights differ in length")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        _check_sorted(lam)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.eigenvalues.size

    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def mass_below(self, t: float, closed: bool = False) -> float:
        """mu([0, t)) or, with ``closed``, mu([0, t])."""
        side = "right" if closed else "left"
        i = np.searchsorted(self.eigenvalues, t, side=side)
        return float(np.sum(self.weights[:i]))

    def prefix_mass(self) -> np.ndarray:
        """``mu([0, lambda_i])`` for every atom."""
        return np.cumsum(self.weights)

    def weighted(self, power: float) -> "DiscreteSpectralMeasure":
        """The measure ``lambda**power d mu``."""
        return DiscreteSpectralMeasure(
            self.eigenvalues, self.weights * self.eigenvalues**power
        )


@dataclass(frozen=True)
class SpectralProblem:
    """A linear inverse problem reduced to its spectral data.

    ``element`` holds x_dagger - x_0; the data coefficients of
    y_dagger - T x_0 in the shared basis are ``sqrt(lambda_i) * c_i``.
    """

    element: SpectralElement
    operator_norm_sq: float = field(default=None)
    label: str = ""

    def __post_init__(self):
        lam = self.element.eigenvalues
        if lam.size == 0:
            raise ValueError("a problem needs at least one eigenvalue")
        top = float(lam[-1])
        if self.operator_norm_sq is None:
            object.__setattr__(self, "operator_norm_sq", top)
        elif self.operator_norm_sq < top * (1 - 1e-12):
            raise ValueError(
                f"operator_norm_sq={self.operator_norm_sq} is below the "
                f"largest eigenvalue {top}"
            )

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.element.eigenvalues

    def clean_data(self) -> np.ndarray:
        """Coefficients of y_dagger - T x_0."""
        return np.sqrt(self.eigenvalues) * self.element.coefficients


def measure_from_atoms(pairs) -> SpectralElement:
    """Build an element from unsorted ``(eigenvalue, coefficient)`` pairs.

    Eigenvalues that coincide up to :data:`MERGE_RTOL` are merged by the
    root-sum-square of their coefficients; the merged coefficient takes the
    sign of the largest contributor.
    """
    pairs = list(pairs)
    if not pairs:
        return SpectralElement.zero()
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    lam, c = arr[:, 0], arr[:, 1]
    if np.any(~np.isfinite(arr)):
        raise ValueError("atoms must be finite")
    if np.any(lam <= 0):
        bad = lam[lam <= 0][0]
        raise ValueError(
            f"eigenvalue {bad!r} is not positive; T is assumed injective "
            "(no spectral mass at 0), so quotient out the kernel first"
        )
    order = np.argsort(lam, kind="stable")
    lam, c = lam[order], c[order]

    out_lam, out_c = [], []
    start = 0
    for i in range(1, lam.size + 1):
        if i < lam.size and lam[i] - lam[start] <= MERGE_RTOL * lam[start]:
            continue
        group = c[start:i]
        mag = float(np.sqrt(np.sum(group**2)))
        sign = -1.0 if group[np.argmax(np.abs(group))] < 0 else 1.0
        out_lam.append(lam[start])
        out_c.append(sign * mag)
        start = i
    return SpectralElement(out_lam, out_c)


def project_below(x: SpectralElement, t: float, closed: bool = False) -> SpectralElement:
    """E_[0,t) x, or E_[0,t] x when ``closed``."""
    if not t > 0:
        raise ValueError("t must be positive")
    side = "right" if closed else "left"
    i = np.searchsorted(x.eigenvalues, t, side=side)
    return SpectralElement(x.eigenvalues[:i], x.coefficients[:i])


def apply_power(x: SpectralElement, r: float) -> SpectralElement:
    """(T*T)**r x."""
    if r == 0:
        return x
    return x.with_coefficients(x.eigenvalues**r * x.coefficients)


def operator_norm(p: SpectralProblem | SpectralElement) -> float:
    """||T*T||, i.e. the largest eigenvalue."""
    lam = p.eigenvalues
    if lam.size == 0:
        raise ValueError("empty spectrum has no operator norm")
    return float(lam[-1])
