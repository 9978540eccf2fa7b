"""Problem files in, CSV and JSON reports out."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .builtin import ExampleId
from .checks import Check
from .spectral import SpectralElement, SpectralProblem, measure_from_atoms

__all__ = [
    "InputError",
    "ProblemSpec",
    "load_problem",
    "parse_problem",
    "format_value",
    "render_csv",
    "render_json",
    "report_dict",
    "validate_report",
]

SCHEMA_VERSION = 1


class InputError(ValueError):
    """A problem file or command-line value is malformed."""


@lru_cache(maxsize=None)
def _schema(name: str) -> dict:
    text = resources.files("regrates").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


@dataclass
class ProblemSpec:
    """A validated problem file: the spectral problem plus its noise and method blocks."""

    problem: SpectralProblem
    noise: dict = field(default_factory=dict)
    method: dict = field(default_factory=dict)


def _field_path(err: jsonschema.ValidationError) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)


def parse_problem(doc: dict) -> ProblemSpec:
    """Validate a decoded problem document and build the spectral problem.

    ``prior`` holds the coefficients of the initial guess, aligned with the
    atoms as listed (for built-in examples: increasing eigenvalue order).
    """
    validator = jsonschema.Draft202012Validator(_schema("problem.schema.json"))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{_field_path(e)}: {e.message}" for e in errors]
        raise InputError("problem file does not match the schema:\n  " + "\n  ".join(lines))
    try:
        if "atoms" in doc:
            lam = np.array([a[0] for a in doc["atoms"]], dtype=float)
            coef = np.array([a[1] for a in doc["atoms"]], dtype=float)
            label = doc.get("label", "")
        else:
            example = ExampleId.parse(doc["example"])
            base = example.build()
            lam, coef = base.eigenvalues, base.element.coefficients
            label = doc.get("label", str(example))
        if "prior" in doc:
            prior = np.asarray(doc["prior"], dtype=float)
            if prior.shape != coef.shape:
                raise InputError(f"$.prior: expected {coef.size} coefficients, got {prior.size}")
            coef = coef - prior
        if "atoms" in doc:
            element = measure_from_atoms(list(zip(lam, coef)))
        else:
            element = SpectralElement(lam, coef)
        problem = SpectralProblem(element, doc.get("operator_norm_sq"), label)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return ProblemSpec(problem, dict(doc.get("noise", {})), dict(doc.get("method", {})))


def load_problem(path: str) -> ProblemSpec:
    """Read a UTF-8 JSON problem file; syntax errors report line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    return parse_problem(doc)


def format_value(v) -> str:
    """Shortest round-trip text for floats, lower-case booleans."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def render_csv(columns, rows, footer: dict | None = None) -> str:
    """Comma-separated table with a header row; the footer becomes ``# key=value`` lines."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    for key, val in (footer or {}).items():
        buf.write(f"# {key}={format_value(val)}\n")
    return buf.getvalue()


def report_dict(command: str, columns, rows, checks=(), footer: dict | None = None,
                passed: bool | None = None) -> dict:
    checks = [c.to_json() if isinstance(c, Check) else c for c in checks]
    if passed is None:
        passed = all(c["pass"] for c in checks)
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "passed": bool(passed),
        "columns": list(columns),
        "rows": [[_json_value(v) for v in row] for row in rows],
        "checks": checks,
    }
    if footer:
        out["footer"] = {k: _json_value(v) for k, v in footer.items()}
    return out


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False, allow_nan=False) + "\n"


def validate_report(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``report`` does not match the report schema."""
    jsonschema.validate(report, _schema("report.schema.json"),
                        cls=jsonschema.Draft202012Validator)
