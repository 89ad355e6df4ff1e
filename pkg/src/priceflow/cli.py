"""Command-line surface: simulate runs, certify traces, query spectra.

Three subcommands over plain files:

* ``simulate CONFIG -o TRACE.csv``: run the price iteration described by
  a JSON config and persist the trace.
* ``certify TRACE.csv --gamma G --t0 K (--a1 A --a2 B | --fit)``: check
  the descent inequalities on a persisted trace and write a JSON report.
* ``spectra --n N [--y ... --z ...]``: print the arrowhead spectrum, the
  convexity verdict, and optionally the form's value at a point.

Exit codes: 0 success, 1 divergence or a failed certification, 2 bad
input (config, trace file, or arguments).  Floats are serialized with 17
significant digits so every double survives the round trip bit for bit.
The environment variable PRICEFLOW_TOLERANCE overrides the default 1e-9
certification slack.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import certify as cert
from . import engine, model
from .dual import num_oracle, rate_vector

TOLERANCE_ENV = "PRICEFLOW_TOLERANCE"

_ENGINE_DEFAULTS = {
    "t0": 0,
    "steps": 1000,
    "seed": 0,
    "delay_model": "none",
    "fixed_delay": 0,
}


class TraceFormatError(ValueError):
    """A trace CSV that does not follow the documented schema."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_trace_csv(trace: engine.Trace, path: str) -> None:
    """Persist a trace.  Columns: t, D, pi_norm_sq, then prices p_0..,
    then rates x_0..; the final row leaves pi_norm_sq empty because the
    next price vector was never computed."""
    n, L = trace.p.shape
    S = trace.x.shape[1]
    header = (
        ["t", "D", "pi_norm_sq"]
        + [f"p_{i}" for i in range(L)]
        + [f"x_{i}" for i in range(S)]
    )
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for t in range(n):
            pi_cell = _fmt(trace.pi_norm_sq[t]) if t < n - 1 else ""
            cells = (
                [str(t), _fmt(trace.D[t]), pi_cell]
                + [_fmt(v) for v in trace.p[t]]
                + [_fmt(v) for v in trace.x[t]]
            )
            fh.write(",".join(cells) + "\n")


def read_trace_csv(path: str):
    """Load a trace CSV back into arrays.

    Returns (D, pi_norm_sq, P, X).  Raises TraceFormatError on any
    structural problem: wrong header, ragged rows, non-numeric cells, or
    an empty increment cell anywhere but the final row.
    """
    try:
        with open(path, "r", newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise TraceFormatError(f"cannot read trace: {exc}") from exc
    if not lines:
        raise TraceFormatError("empty trace file")
    header = lines[0].split(",")
    if header[:3] != ["t", "D", "pi_norm_sq"]:
        raise TraceFormatError(f"unexpected header start: {header[:3]}")
    p_cols = [h for h in header[3:] if h.startswith("p_")]
    x_cols = [h for h in header[3 + len(p_cols) :]]
    if not p_cols or not x_cols or any(not h.startswith("x_") for h in x_cols):
        raise TraceFormatError("header must list p_* columns then x_* columns")
    L, S = len(p_cols), len(x_cols)
    rows = lines[1:]
    if not rows:
        raise TraceFormatError("trace has no data rows")
    n = len(rows)
    D = np.empty(n)
    w = np.empty(n - 1)
    P = np.empty((n, L))
    X = np.empty((n, S))
    for t, line in enumerate(rows):
        cells = line.split(",")
        if len(cells) != 3 + L + S:
            raise TraceFormatError(f"row {t}: expected {3 + L + S} cells, got {len(cells)}")
        try:
            if int(cells[0]) != t:
                raise TraceFormatError(f"bad time index {cells[0]!r}")
            D[t] = float(cells[1])
            if cells[2] == "":
                if t != n - 1:
                    raise TraceFormatError(f"row {t}: empty pi_norm_sq before final row")
            else:
                if t == n - 1:
                    raise TraceFormatError("final row must leave pi_norm_sq empty")
                w[t] = float(cells[2])
            P[t] = [float(v) for v in cells[3 : 3 + L]]
            X[t] = [float(v) for v in cells[3 + L :]]
        except ValueError as exc:
            raise TraceFormatError(f"row {t}: {exc}") from exc
    return D, w, P, X


def normalize_config(doc: dict) -> dict:
    """Return the config with every default made explicit."""
    if not isinstance(doc, dict) or "network" not in doc:
        raise model.NetworkError("config must be a JSON object with a 'network' section")
    spec = model.from_dict(doc["network"])
    net = model.validate_network(spec)
    engine_doc = dict(doc.get("engine", {}))
    merged = {**_ENGINE_DEFAULTS, **engine_doc}
    if "gamma" not in merged:
        raise engine.ConfigError("engine.gamma is required (or pass --gamma)")
    p0 = doc.get("initial_prices")
    if p0 is None:
        p0 = [0.0] * net.num_links
    return {
        "network": model.to_dict(spec),
        "engine": {
            "gamma": float(merged["gamma"]),
            "t0": merged["t0"],
            "steps": merged["steps"],
            "seed": merged["seed"],
            "delay_model": merged["delay_model"],
            "fixed_delay": merged["fixed_delay"],
        },
        "initial_prices": [float(v) for v in p0],
    }


def _load_config(path: str, args) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise model.NetworkError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise model.NetworkError("config root must be a JSON object")
    engine_doc = dict(doc.get("engine", {}))
    for key in ("gamma", "steps", "t0", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            engine_doc[key] = value
    doc = {**doc, "engine": engine_doc}
    return normalize_config(doc)


def _report_dict(report: cert.CertReport) -> dict:
    unbounded = report.gamma_max is not None and math.isinf(report.gamma_max)
    constants = None
    certified = None
    if report.constants is not None:
        constants = {
            "a1": report.constants.a1,
            "a2": report.constants.a2,
            "fitted": report.fitted,
        }
        certified = unbounded or report.constants.gamma < report.gamma_max
    margins = report.per_step_margins
    min_at = None if margins is None or not margins.size else int(margins.argmin())
    return {
        "verdict": report.verdict,
        "violated_at": report.violated_at,
        "gamma": None if report.constants is None else report.constants.gamma,
        "t0": None if report.constants is None else report.constants.t0,
        "constants": constants,
        "gamma_max": None if report.gamma_max is None or unbounded else report.gamma_max,
        "gamma_max_unbounded": unbounded,
        "step_size_certified": certified,
        "tolerance": report.tolerance,
        "num_margins": None if margins is None else int(margins.size),
        "min_margin": None if min_at is None else float(margins[min_at]),
        "min_margin_at": min_at,
        "telescoped_margin": report.telescoped_margin,
        "total_margin": report.total_margin,
        "per_step_margins": None if margins is None else [float(v) for v in margins],
        "notes": list(report.notes),
    }


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_simulate(args) -> int:
    try:
        doc = _load_config(args.config, args)
    except (model.NetworkError, engine.ConfigError) as exc:
        return _fail(str(exc), 2)
    if args.print_config:
        print(json.dumps(doc, indent=2))
        return 0
    try:
        net = model.validate_network(model.from_dict(doc["network"]))
        e = doc["engine"]
        cfg = engine.EngineConfig(
            gamma=e["gamma"],
            t0=int(e["t0"]),
            steps=int(e["steps"]),
            seed=int(e["seed"]),
            delay_model=e["delay_model"],
            fixed_delay=int(e["fixed_delay"]),
        )
        trace = engine.run(net, cfg, np.asarray(doc["initial_prices"], dtype=float))
    except (model.NetworkError, engine.ConfigError, TypeError, ValueError) as exc:
        return _fail(str(exc), 2)
    write_trace_csv(trace, args.out)
    bad = engine.diverged(trace)
    final_pi = (
        _fmt(math.sqrt(trace.pi_norm_sq[-1])) if trace.pi_norm_sq.size else "n/a"
    )
    summary = (
        f"steps={trace.num_rows} final_D={_fmt(trace.D[-1])} "
        f"final_pi_norm={final_pi} diverged={str(bad).lower()}"
    )
    if args.oracle:
        sol = num_oracle(net)
        gap = float(
            np.max(np.abs(trace.x[-1] - sol.x_star) / np.maximum(np.abs(sol.x_star), 1e-12))
        )
        summary += f" oracle_rate_gap={gap:.3e} converged={str(gap <= 1e-3).lower()}"
    print(summary)
    return 1 if bad else 0


def cmd_certify(args) -> int:
    raw_tol = os.environ.get(TOLERANCE_ENV)
    tolerance = cert.DEFAULT_TOLERANCE
    if raw_tol is not None:
        try:
            tolerance = float(raw_tol)
        except ValueError:
            return _fail(f"{TOLERANCE_ENV} must be a float, got {raw_tol!r}", 2)
    if args.fit == (args.a1 is not None or args.a2 is not None):
        return _fail("pass exactly one of --fit or both --a1 and --a2", 2)
    if not args.fit and (args.a1 is None or args.a2 is None):
        return _fail("--a1 and --a2 must be given together", 2)
    try:
        D, w, _, _ = read_trace_csv(args.trace)
    except TraceFormatError as exc:
        return _fail(str(exc), 2)
    try:
        if args.fit:
            report = cert.certify_trace(
                D, w, fit=True, t0=args.t0, gamma=args.gamma, tolerance=tolerance
            )
        else:
            constants = cert.Constants(a1=args.a1, a2=args.a2, t0=args.t0, gamma=args.gamma)
            report = cert.certify_trace(D, w, constants=constants, tolerance=tolerance)
    except (ValueError, cert.TraceLengthError) as exc:
        return _fail(str(exc), 2)
    payload = json.dumps(_report_dict(report), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    gm = report.gamma_max
    gm_text = "n/a" if gm is None else ("inf" if math.isinf(gm) else _fmt(gm))
    print(
        f"verdict={report.verdict} margins={0 if report.per_step_margins is None else report.per_step_margins.size} "
        f"gamma_max={gm_text}",
        file=sys.stderr,
    )
    return 0 if report.verdict == cert.VERDICT_HOLDS else 1


def _parse_point(raw_y: str, raw_z: str):
    def scalar(tok: str):
        tok = tok.strip()
        try:
            return int(tok)
        except ValueError:
            return float(tok)

    y = [scalar(tok) for tok in raw_y.split(",") if tok.strip() != ""]
    return y, scalar(raw_z)


def cmd_spectra(args) -> int:
    if args.n < 1:
        return _fail(f"--n must be a positive integer, got {args.n}", 2)
    if (args.y is None) != (args.z is None):
        return _fail("--y and --z must be given together", 2)
    from . import spectra

    result = spectra.eigenvalues(args.n)
    payload = {
        "n": args.n,
        "eigenvalues": [float(v) for v in result.eigenvalues],
        "min_eigenvalue": result.min_eigenvalue,
        "convex": result.convex,
    }
    if args.y is not None:
        try:
            y, z = _parse_point(args.y, args.z)
        except ValueError as exc:
            return _fail(f"bad point: {exc}", 2)
        if len(y) != args.n:
            return _fail(f"--y has {len(y)} entries but --n is {args.n}", 2)
        payload["f_value"] = spectra.f_eval(y, z)
    print(json.dumps(payload, indent=2))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="priceflow",
        description="Dual gradient-projection flow control: simulate, certify, inspect spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the price iteration from a JSON config")
    sim.add_argument("config", help="path to the run config JSON")
    sim.add_argument("-o", "--out", default="trace.csv", help="trace CSV output path")
    sim.add_argument("--gamma", type=float, default=None, help="override engine.gamma")
    sim.add_argument("--steps", type=int, default=None, help="override engine.steps")
    sim.add_argument("--t0", type=int, default=None, help="override engine.t0")
    sim.add_argument("--seed", type=int, default=None, help="override engine.seed")
    sim.add_argument("--oracle", action="store_true", help="compare final rates to the KKT oracle")
    sim.add_argument(
        "--print-config",
        action="store_true",
        help="print the fully defaulted config and exit",
    )
    sim.set_defaults(func=cmd_simulate)

    cer = sub.add_parser("certify", help="check descent inequalities on a trace CSV")
    cer.add_argument("trace", help="path to a trace CSV")
    cer.add_argument("--gamma", type=float, required=True, help="step size used for the run")
    cer.add_argument("--t0", type=int, required=True, help="delay bound used for the run")
    cer.add_argument("--a1", type=float, default=None, help="first curvature constant")
    cer.add_argument("--a2", type=float, default=None, help="second curvature constant")
    cer.add_argument("--fit", action="store_true", help="fit the constants from the trace")
    cer.add_argument("-o", "--out", default=None, help="report JSON output path (default: stdout)")
    cer.set_defaults(func=cmd_certify)

    spe = sub.add_parser("spectra", help="arrowhead spectrum and convexity verdict")
    spe.add_argument("--n", type=int, required=True, help="y-dimension of the quadratic form")
    spe.add_argument("--y", default=None, help="comma-separated y to evaluate f at")
    spe.add_argument("--z", default=None, help="z to evaluate f at")
    spe.set_defaults(func=cmd_spectra)
    return parser


def entry(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(entry())
