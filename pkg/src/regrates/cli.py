"""Command-line interface: ``regrates {norms,rates,noisy,verify}``.

Exit status is 0 when every check passes, 1 on a verification failure and 2
on malformed input.
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .checks import Report, leq
from .interp import hilbert_norm, interp_norm, sandwich_report, triple_norm
from .io import InputError, load_problem, render_csv, render_json, report_dict, validate_report
from .noisy import (
    DEFAULT_DELTAS,
    DEFAULT_TAU,
    StoppingError,
    rate_exponent_fit,
    landweber_discrepancy_sweep,
    tikhonov_apriori_sweep,
)
from .rates import delta_rate, tikhonov_rate
from .regularizers import default_sigma
from .verify import SUITES, run_suite, thread_count

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

NORM_COLUMNS = [
    "nu", "gamma", "norm", "hilbert_gamma", "triple_nu", "interp",
    "chain_a", "chain_b", "chain_c", "chain_d", "chain_e",
    "equiv_lower", "equiv_mid", "equiv_upper", "pass",
]
RATE_COLUMNS = ["nu", "method", "order", "r", "sup", "arg", "lower", "upper", "pass"]
NOISY_COLUMNS = ["delta", "param", "error", "residual"]
VERIFY_COLUMNS = ["id", "lhs", "rhs", "tolerance", "pass"]


def parse_floats(text: str, name: str) -> list[float]:
    """A comma list ``a,b,c`` or an inclusive range ``start:stop:count``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 0:
                raise ValueError
            return [float(v) for v in np.linspace(start, stop, count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"--{name}: expected 'a,b,...' or 'start:stop:count', got {text!r}") from None


def _nus(args, method: dict) -> list[float]:
    if args.nu is not None:
        return parse_floats(args.nu, "nu")
    nu = method.get("nu", 0.5)
    return [float(v) for v in (nu if isinstance(nu, list) else [nu])]


def _pick(args, method: dict, name: str, default):
    val = getattr(args, name)
    return method.get(name, default) if val is None else val


def _map(fn, items):
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        return list(pool.map(fn, items))


def cmd_norms(args, spec):
    x = spec.problem.element
    gamma = float(_pick(args, spec.method, "gamma", 1.0))
    nus = _nus(args, spec.method)
    for nu in nus:
        if not 0 <= nu < gamma:
            raise InputError(f"--nu: need 0 <= nu < gamma = {gamma}, got {nu}")

    def row(nu):
        rep = sandwich_report(x, nu, gamma)
        equiv = rep.values.get("equiv", (math.nan,) * 3)
        return rep, [nu, gamma, x.norm(), hilbert_norm(x, gamma), triple_norm(x, nu).value,
                     interp_norm(x, nu, gamma).value, *rep.values["chain"], *equiv, rep.passed]

    out = _map(row, nus)
    checks = [c for rep, _ in out for c in rep.checks]
    return NORM_COLUMNS, [r for _, r in out], checks, None


def cmd_rates(args, spec):
    x = spec.problem.element
    method = spec.method
    kind = args.method or method.get("kind", "tikhonov")
    nus = _nus(args, method)
    if kind == "tikhonov":
        k = int(_pick(args, method, "k", 1))
        for nu in nus:
            if not 0 <= nu <= k:
                raise InputError(f"--nu: Tikhonov of order {k} needs 0 <= nu <= {k}, got {nu}")

        def one(nu):
            return tikhonov_rate(x, nu, k)
    elif kind == "landweber":
        r = float(_pick(args, method, "r", 0.0))
        sigma = _pick(args, method, "sigma", None)
        sigma = default_sigma(spec.problem) if sigma is None else float(sigma)
        if sigma * spec.problem.operator_norm_sq > 1 + 1e-14:
            raise InputError(f"--sigma: sigma ||T*T|| must not exceed 1, got {sigma}")
        for nu in nus:
            if not nu > 0:
                raise InputError(f"--nu: Landweber rates need nu > 0, got {nu}")

        def one(nu):
            return delta_rate(x, nu, r, sigma)
    else:
        raise InputError(f"--method: rates support tikhonov and landweber, got {kind!r}")
    reports = _map(one, nus)
    rows = [[rr.row()[c] for c in RATE_COLUMNS] for rr in reports]
    rep = Report()
    for rr in reports:
        tag = f"{rr.method}[nu={rr.nu!r}]"
        rep.add(leq(f"{tag}.lower", rr.bounds[0], rr.sup_value, 1e-6))
        rep.add(leq(f"{tag}.upper", rr.sup_value, rr.bounds[1], 1e-6))
    return RATE_COLUMNS, rows, rep.checks, None


def cmd_noisy(args, spec):
    p = spec.problem
    method, noise = spec.method, spec.noise
    kind = args.method or method.get("kind", "landweber")
    deltas = parse_floats(args.deltas, "deltas") if args.deltas else noise.get("deltas", list(DEFAULT_DELTAS))
    if any(d < 0 for d in deltas):
        raise InputError("--deltas: noise levels must be nonnegative")
    if sorted(deltas, reverse=True) != list(deltas):
        raise InputError("--deltas: noise levels must be listed in decreasing order")
    strategy = noise.get("strategy", "random")
    seed = args.seed if args.seed is not None else noise.get("seed", 0)
    if kind == "landweber":
        tau = float(_pick(args, method, "tau", DEFAULT_TAU))
        sigma = _pick(args, method, "sigma", None)
        nus = _nus(args, method) if (args.nu or "nu" in method) else [None]
        sweep = landweber_discrepancy_sweep(p, deltas, tau, sigma, strategy, seed, nus[0],
                                            workers=thread_count())
    elif kind == "tikhonov":
        sweep = tikhonov_apriori_sweep(p, deltas, strategy, seed, workers=thread_count())
    else:
        raise InputError(f"--method: noisy sweeps support tikhonov and landweber, got {kind!r}")
    rows = [[r["delta"], r["param"], r["error"], r["residual"]] for r in sweep.rows()]
    return NOISY_COLUMNS, rows, [], _fit_footer(rows)


def _fit_footer(rows):
    pairs = [(r[0], r[2]) for r in rows if r[0] > 0 and r[2] > 0]
    if len(pairs) < 3:
        return None
    slope, intercept, rms = rate_exponent_fit(pairs)
    footer = {"error_slope": slope, "error_intercept": intercept, "error_rms": rms}
    params = [(r[0], r[1]) for r in rows if r[0] > 0 and 0 < r[1] < math.inf]
    if len(params) >= 3:
        footer["param_slope"] = rate_exponent_fit(params)[0]
    return footer


def cmd_verify(args):
    rep = run_suite(args.suite, seed=args.seed or 0)
    rows = [[c.id, c.lhs, c.rhs, c.tolerance, c.passed] for c in rep.checks]
    failures = rep.failures
    print(f"suite {args.suite}: {len(rep.checks) - len(failures)}/{len(rep.checks)} checks passed",
          file=sys.stderr)
    for c in failures:
        print(f"  FAIL {c.id}: lhs={c.lhs!r} rhs={c.rhs!r} tol={c.tolerance!r}", file=sys.stderr)
    return VERIFY_COLUMNS, rows, rep.checks, None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regrates", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, help="noise / sampling seed")
    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--problem", required=True, help="problem file (JSON)")
    problem.add_argument("--nu", help="smoothness values: 'a,b,...' or 'start:stop:count'")
    problem.add_argument("--gamma", type=float)
    problem.add_argument("--k", type=int, help="Tikhonov order")
    problem.add_argument("--r", type=float, help="Landweber error power")
    problem.add_argument("--sigma", type=float, help="Landweber step size")
    problem.add_argument("--tau", type=float, help="discrepancy threshold")
    problem.add_argument("--deltas", help="noise levels: 'a,b,...' or 'start:stop:count'")
    problem.add_argument("--method", choices=("tikhonov", "landweber"))

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("norms", parents=[common, problem], help="norms and the embedding chain")
    sub.add_parser("rates", parents=[common, problem], help="noise-free rate functionals")
    sub.add_parser("noisy", parents=[common, problem], help="noisy sweeps with a parameter rule")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, default="all")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            columns, rows, checks, footer = cmd_verify(args)
        else:
            spec = load_problem(args.problem)
            handler = {"norms": cmd_norms, "rates": cmd_rates, "noisy": cmd_noisy}[args.command]
            columns, rows, checks, footer = handler(args, spec)
    except (InputError, ValueError, StoppingError) as exc:
        print(f"regrates: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = report_dict(args.command, columns, rows, checks, footer)
    if args.format == "json":
        validate_report(report)
        text = render_json(report)
    else:
        text = render_csv(columns, rows, footer)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
