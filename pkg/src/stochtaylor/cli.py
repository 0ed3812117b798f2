"""Command line front end.

Every invocation is turned into an experiment config dict, validated
against :data:`~stochtaylor.schemas.CONFIG_SCHEMA`, and executed.  Each run
writes ``<tag>.csv`` (per-outcome detail) and ``<tag>.json`` (summary) to
the output directory: ``--out-dir``, else ``$STOCHTAYLOR_OUT``, else the
current directory.  ``<tag>`` defaults to the command name.

Exit status: 0 on success, 1 on an invalid config, 2 if any outcome or
replicate failed to solve.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import probability as prob
from .fields import BUILTINS, parse_fn
from .reports import csv_text, json_text, write_text
from .schemas import CONFIG_SCHEMA, SUMMARY_SCHEMA, SchemaError, validate
from .selector import NoRootFound, SelectionErrors, SelectionPolicy, apply_over_sample, solve_selector_uni
from .stats_apps import IDENTITY_RTOL, MODELS, delta_method_experiment, mle_monte_carlo, two_rv_selector
from .taylor_core import DomainError, partial_sum_uni

OUT_ENV = "STOCHTAYLOR_OUT"

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


class RunOutcome:
    def __init__(self, rows: List[dict], summary: dict, extra: Sequence[str] = (), message: str = ""):
        self.rows = rows
        self.summary = summary
        self.extra = tuple(extra)
        self.message = message


def _policy(cfg) -> SelectionPolicy:
    kw = {k: cfg[k] for k in ("scan_points", "refine_tol", "residual_tol") if k in cfg}
    return SelectionPolicy(cfg.get("policy", "sup"), **kw)


def _row(omega, x, res) -> dict:
    return {"id": omega, "X": x, "xi": res.xi, "theta": res.theta, "residual": res.residual}


def _counts(total: int, failures: List[str], max_residual) -> dict:
    return {
        "total": total,
        "passed": total - len(failures),
        "failed": len(failures),
        "failures": failures,
        "max_residual": max_residual,
    }


def _max_abs(values) -> Optional[float]:
    vals = [abs(v) for v in values if v is not None and math.isfinite(v)]
    return max(vals) if vals else None


# --------------------------------------------------------------------------
# commands


def cmd_expand(cfg) -> RunOutcome:
    f = parse_fn(cfg["fn"])
    a, x, n = float(cfg["a"]), float(cfg["x"]), int(cfg["n"])
    value = float(f(a + x))
    psum = partial_sum_uni(f, a, x, n)
    res = solve_selector_uni(f, a, x, n, _policy(cfg))
    row = _row("0", x, res) | {"value": value, "partial_sum": psum, "remainder": value - psum}
    summary = _counts(1, [], abs(res.residual)) | {
        "value": value, "partial_sum": psum, "remainder": value - psum, "xi": res.xi, "theta": res.theta,
    }
    msg = f"f(a+x) = {value!r}\npartial sum = {psum!r}\nremainder = {value - psum!r}\nxi = {res.xi!r}"
    return RunOutcome([row], summary, ("value", "partial_sum", "remainder"), msg)


def cmd_solve(cfg) -> RunOutcome:
    f = parse_fn(cfg["fn"])
    a, x = float(cfg["a"]), float(cfg["x"])
    res = solve_selector_uni(f, a, x, int(cfg["n"]), _policy(cfg))
    summary = _counts(1, [], abs(res.residual)) | {
        "xi": res.xi, "theta": res.theta, "point": res.point, "root_count_estimate": res.root_count_estimate,
    }
    return RunOutcome([_row("0", x, res) | {"point": res.point}], summary, ("point",),
                      f"xi = {res.xi!r}\ntheta = {res.theta!r}\nresidual = {res.residual!r}")


def cmd_verify(cfg) -> RunOutcome:
    f = parse_fn(cfg["fn"])
    a, n = float(cfg["a"]), int(cfg["n"])
    policy = _policy(cfg)
    tol = cfg.get("residual_tol", IDENTITY_RTOL)
    space, X = prob.empirical_space(prob.SampleStream(cfg["seed"], cfg["dist"], cfg["N"]))
    rows, failures, rel = [], [], []
    for omega in space.outcomes:
        x = X[omega]
        try:
            res = solve_selector_uni(f, a, x, n, policy)
        except (NoRootFound, DomainError) as exc:
            failures.append(f"{omega}: {exc}")
            rows.append({"id": omega, "X": x, "ok": False})
            continue
        r = abs(res.residual) / (1.0 + abs(float(f(a + x))))
        ok = r <= tol and res.bracket.contains(res.xi)
        if not ok:
            failures.append(f"{omega}: relative residual {r:.3e}")
        rel.append(r)
        rows.append(_row(omega, x, res) | {"relative_residual": r, "ok": ok})
    summary = _counts(len(rows), failures, _max_abs(r.get("residual") for r in rows)) | {
        "max_relative_residual": _max_abs(rel),
        "pass_fraction": (len(rows) - len(failures)) / len(rows),
    }
    msg = f"passed {summary['passed']}/{summary['total']} (max relative residual {summary['max_relative_residual']})"
    return RunOutcome(rows, summary, ("relative_residual", "ok"), msg)


def cmd_measurability(cfg) -> RunOutcome:
    f = parse_fn(cfg["fn"])
    X = prob.load(cfg["space"])
    a, n = float(cfg.get("a", 0.0)), int(cfg.get("n", 1))
    try:
        xi, results = apply_over_sample(f, a, X, n, _policy(cfg), full=True)
    except SelectionErrors as exc:
        failures = [f"{k}: {v}" for k, v in exc.failures.items()]
        return RunOutcome([], _counts(len(X.space), failures, None) | {"measurable": False}, (), str(exc))
    measurable = prob.is_measurable_wrt(xi, prob.sigma_generated_by(X))
    rows = [_row(o, X[o], results[o]) for o in X.space.outcomes]
    summary = _counts(len(rows), [], _max_abs(r["residual"] for r in rows)) | {
        "measurable": measurable,
        "sigma_X_atoms": [list(b) for b in prob.sigma_generated_by(X)],
    }
    return RunOutcome(rows, summary, (), f"measurable: {'true' if measurable else 'false'}")


def cmd_mle_demo(cfg) -> RunOutcome:
    model = MODELS[cfg["model"]](float(cfg["theta0"]))
    mc = mle_monte_carlo(model, cfg["size"], cfg["reps"], cfg["seed"], _policy(cfg))
    rows, failures = [], []
    for r in mc.records:
        if r.flagged:
            failures.append(f"{r.replicate}: MLE on the domain boundary")
        elif r.relative_residual > IDENTITY_RTOL or not r.between():
            failures.append(f"{r.replicate}: relative residual {r.relative_residual:.3e}")
        rows.append({
            "id": r.replicate, "X": r.theta_hat - r.theta0, "xi": r.theta_star - r.theta0,
            "theta": r.theta, "residual": r.residual, "theta_hat": r.theta_hat,
            "theta_star": r.theta_star, "flagged": r.flagged,
        })
    summary = _counts(len(rows), failures, _max_abs(r.residual for r in mc.records)) | mc.summary
    summary["total"] = len(rows)
    msg = (f"replicates {len(rows)}, identity pass {mc.summary['identity_pass']}, "
           f"strictly between {mc.summary['strictly_between_fraction']:.4f}")
    return RunOutcome(rows, summary, ("theta_hat", "theta_star", "flagged"), msg)


def cmd_delta_demo(cfg) -> RunOutcome:
    g = parse_fn(cfg["fn"])
    sampler = prob.parse_distribution(cfg["dist"])
    mu, sigma = prob.distribution_moments(cfg["dist"])
    rep = delta_method_experiment(g, mu, sigma, sampler, cfg["size"], cfg["reps"], cfg["seed"], _policy(cfg))
    rows = [
        {"id": i, "X": rep.xbar[i] - mu, "xi": rep.xi[i] - mu, "theta": rep.theta[i],
         "residual": rep.residuals[i], "xbar": rep.xbar[i], "z": rep.standardized[i]}
        for i in range(rep.reps)
    ]
    rows = [{k: (float(v) if isinstance(v, np.floating) else v) for k, v in r.items()} for r in rows]
    summary = _counts(rep.reps, [], _max_abs(rep.residuals.tolist())) | {
        "mu": mu, "sigma": sigma, "ks_distance": rep.ks_distance,
        "ks_critical_1pct": rep.critical_value_1pct, "max_abs_xi_dev": rep.max_abs_xi_dev,
    }
    return RunOutcome(rows, summary, ("xbar", "z"),
                      f"KS distance {rep.ks_distance:.4f} (1% critical {rep.critical_value_1pct:.4f})")


def cmd_two_rv(cfg) -> RunOutcome:
    f = parse_fn(cfg["fn"])
    X, Y = prob.load(cfg["space"]), prob.load(cfg["other"])
    try:
        xi, report = two_rv_selector(f, X, Y, _policy(cfg))
    except SelectionErrors as exc:
        failures = [f"{k}: {v}" for k, v in exc.failures.items()]
        return RunOutcome([], _counts(len(X.space), failures, None) | {"measurable": False}, (), str(exc))
    rows = [
        {"id": o, "X": X[o] - Y[o], "xi": xi[o] - Y[o], "theta": report.thetas[o],
         "residual": report.residuals[o], "x_value": X[o], "y_value": Y[o], "xi_point": xi[o]}
        for o in X.space.outcomes
    ]
    summary = _counts(len(rows), [], report.max_residual) | {
        "measurable": report.measurable, "all_between": report.all_between,
    }
    return RunOutcome(rows, summary, ("x_value", "y_value", "xi_point"),
                      f"measurable w.r.t. sigma(X, Y): {'true' if report.measurable else 'false'}")


COMMANDS = {
    "expand": cmd_expand,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "measurability": cmd_measurability,
    "mle-demo": cmd_mle_demo,
    "delta-demo": cmd_delta_demo,
    "two-rv": cmd_two_rv,
}


# --------------------------------------------------------------------------
# driver


def output_dir(cfg) -> Path:
    return Path(cfg.get("out_dir") or os.environ.get(OUT_ENV) or ".")


def run(cfg: dict, stdout=None) -> int:
    """Validate and execute one config; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        validate(cfg, CONFIG_SCHEMA)
        outcome = COMMANDS[cfg["command"]](cfg)
    except SchemaError as exc:
        for line in exc.errors:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_INVALID
    except (NoRootFound, SelectionErrors) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    summary = {"command": cfg["command"], "config": cfg} | outcome.summary
    validate(json.loads(json_text(summary)), SUMMARY_SCHEMA, finite=False)
    out = output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    tag = cfg.get("tag", cfg["command"])
    write_text(out / f"{tag}.csv", csv_text(outcome.rows, outcome.extra))
    write_text(out / f"{tag}.json", json_text(summary))
    if outcome.message:
        print(outcome.message, file=stdout)
    return EXIT_SOLVER if outcome.summary["failed"] else EXIT_OK


def _add_common(p: argparse.ArgumentParser, fn: bool = True):
    if fn:
        p.add_argument("--fn", help="builtin function: " + "; ".join(BUILTINS))
    p.add_argument("--policy", choices=["sup", "inf"])
    p.add_argument("--scan-points", dest="scan_points", type=int)
    p.add_argument("--refine-tol", dest="refine_tol", type=float)
    p.add_argument("--residual-tol", dest="residual_tol", type=float)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--tag")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochtaylor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a JSON config file")
    p.add_argument("config")

    for name, text in (("expand", "partial sum and remainder at one point"),
                       ("solve", "intermediate point for one increment")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--a", type=float)
        p.add_argument("--x", type=float)
        p.add_argument("--n", type=int)

    p = sub.add_parser("verify", help="selector residuals on a seeded sample of increments")
    _add_common(p)
    p.add_argument("--a", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--dist")
    p.add_argument("--N", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("measurability", help="exact measurability check on a finite space")
    _add_common(p)
    p.add_argument("--space")
    p.add_argument("--a", type=float)
    p.add_argument("--n", type=int)

    p = sub.add_parser("mle-demo", help="score expansion over Monte Carlo replicates")
    _add_common(p, fn=False)
    p.add_argument("--model", choices=sorted(MODELS))
    p.add_argument("--theta0", type=float)
    p.add_argument("--size", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("delta-demo", help="Delta-method mean value expansion of sample means")
    _add_common(p)
    p.add_argument("--dist")
    p.add_argument("--size", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("two-rv", help="mean value point between two random variables")
    _add_common(p)
    p.add_argument("--space", help="space file carrying X")
    p.add_argument("--other", help="space file carrying Y on the same space")
    return parser


def config_from_args(args: argparse.Namespace) -> dict:
    if args.command == "run":
        with open(args.config, encoding="utf-8") as fh:
            return json.load(fh)
    return {k: v for k, v in vars(args).items() if v is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
