"""Inequality checks shared by the verification routines and the JSON report."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

__all__ = ["Check", "Report", "VerificationError", "leq", "close"]


class VerificationError(AssertionError):
    """An inequality or identity failed beyond its tolerance."""

    def __init__(self, failures):
        self.failures = list(failures)
        lines = [f"{c.id}: lhs={c.lhs!r} rhs={c.rhs!r} tol={c.tolerance!r}" for c in self.failures]
        super().__init__("verification failed\n  " + "\n  ".join(lines))


@dataclass(frozen=True)
class Check:
    id: str
    lhs: float
    rhs: float
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        for k in ("lhs", "rhs", "tolerance"):
            v = d[k]
            if isinstance(v, float) and not math.isfinite(v):
                d[k] = repr(v)
        return d


def leq(id: str, lhs: float, rhs: float, rtol: float = 1e-8, atol: float = 1e-14) -> Check:
    """``lhs <= rhs`` up to ``rtol * |rhs| + atol``."""
    lhs, rhs = float(lhs), float(rhs)
    ok = lhs <= rhs + rtol * abs(rhs) + atol
    return Check(id, lhs, rhs, rtol, bool(ok))


def close(id: str, lhs: float, rhs: float, rtol: float = 1e-8, atol: float = 0.0) -> Check:
    lhs, rhs = float(lhs), float(rhs)
    ok = abs(lhs - rhs) <= rtol * abs(rhs) + atol
    return Check(id, lhs, rhs, rtol if rtol else atol, bool(ok))


@dataclass
class Report:
    """A bundle of checks plus whatever values produced them."""

    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "Report") -> "Report":
        self.checks.extend(other.checks)
        return self

    def raise_if_failed(self) -> "Report":
        if not self.passed:
            raise VerificationError(self.failures)
        return self
