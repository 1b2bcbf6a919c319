"""Command-line interface for inversion, closure, spectral, stability and
finite-volume workflows.

All commands emit JSON (or CSV artifacts for the solver) and follow a fixed
exit-code contract: 0 success, 2 realizability failure, 3 structural
stability failure, 64 usage error, 66 missing input file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .closure import (
    closed_moment_eqmom,
    closed_moment_qmom,
    closure_coeffs_eqmom,
    closure_coeffs_qmom,
)
from .errors import DomainError, InversionError, QbmmError, RealizabilityError
from .inversion import eqmom_forward, eqmom_invert, qmom_forward, qmom_invert
from .solver import SimConfig, free_streaming_reference, run_riemann
from .spectral import analyze_eqmom, analyze_qmom
from .stability import MacroState, SourceModel, stability_report

EXIT_OK = 0
EXIT_REALIZABILITY = 2
EXIT_STABILITY = 3
EXIT_USAGE = 64
EXIT_NOINPUT = 66


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _json_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _emit(payload: dict, code: int = EXIT_OK) -> int:
    print(json.dumps(payload, indent=2, default=_json_default))
    return code


def _usage(message: str) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return EXIT_USAGE


def _read_moments(args) -> np.ndarray:
    if args.moments_file is not None:
        try:
            with open(args.moments_file) as f:
                vals = [float(x) for x in f.read().split()]
        except FileNotFoundError:
            print(json.dumps({"error": f"no such file: {args.moments_file}"}), file=sys.stderr)
            raise SystemExit(EXIT_NOINPUT)
    else:
        vals = args.moments
    return np.asarray(vals, dtype=float)


def _invert_state(m, method: str, n: int):
    """Shared inversion step: returns (state-dict, residual, forward residual)."""
    if method == "eqmom":
        if len(m) != 2 * n + 1:
            raise DomainError(f"eqmom with n={n} needs {2 * n + 1} moments, got {len(m)}")
        state = eqmom_invert(m)
        achieved = eqmom_forward(state, 2 * n)
        desc = {
            "method": "eqmom",
            "weights": list(state.nodes.weights),
            "abscissas": list(state.nodes.abscissas),
            "sigma2": state.sigma2,
        }
        return state, desc, float(np.max(np.abs(achieved - m)))
    if len(m) != 2 * n:
        raise DomainError(f"qmom with n={n} needs {2 * n} moments, got {len(m)}")
    ns = qmom_invert(m)
    achieved = qmom_forward(ns, 2 * n - 1)
    desc = {
        "method": "qmom",
        "weights": list(ns.weights),
        "abscissas": list(ns.abscissas),
    }
    return ns, desc, float(np.max(np.abs(achieved - m)))


def cmd_invert(args) -> int:
    m = _read_moments(args)
    try:
        _, desc, resid = _invert_state(m, args.method, args.n)
    except (RealizabilityError, InversionError) as e:
        return _emit({"error": str(e), "kind": type(e).__name__}, EXIT_REALIZABILITY)
    except DomainError as e:
        return _usage(str(e))
    desc["round_trip_residual"] = resid
    return _emit(desc)


def cmd_closure(args) -> int:
    m = _read_moments(args)
    try:
        state, desc, resid = _invert_state(m, args.method, args.n)
    except (RealizabilityError, InversionError) as e:
        return _emit({"error": str(e), "kind": type(e).__name__}, EXIT_REALIZABILITY)
    except DomainError as e:
        return _usage(str(e))
    if args.method == "eqmom":
        coeffs = closure_coeffs_eqmom(state)
        closed = closed_moment_eqmom(state)
    else:
        coeffs = closure_coeffs_qmom(state)
        closed = closed_moment_qmom(state)
    desc.update(
        {
            "closure_coefficients": list(coeffs.a),
            "closed_moment": closed,
            "round_trip_residual": resid,
        }
    )
    return _emit(desc)


def cmd_spectrum(args) -> int:
    m = _read_moments(args)
    try:
        state, desc, _ = _invert_state(m, args.method, args.n)
    except (RealizabilityError, InversionError) as e:
        return _emit({"error": str(e), "kind": type(e).__name__}, EXIT_REALIZABILITY)
    except DomainError as e:
        return _usage(str(e))
    rep = analyze_eqmom(state) if args.method == "eqmom" else analyze_qmom(state)
    desc.update(
        {
            "eigenvalues": list(rep.eigenvalues),
            "min_gap": rep.min_gap,
            "strictly_hyperbolic": rep.strictly_hyperbolic,
            "defects": [list(d) for d in rep.defects],
        }
    )
    return _emit(desc)


def cmd_stability_check(args) -> int:
    try:
        model = SourceModel(args.model, pr=args.pr)
        rep = stability_report(args.rho, args.u, args.theta, args.n, model)
    except DomainError as e:
        return _usage(str(e))
    payload = {
        "model": args.model,
        "pr": args.pr,
        "n": args.n,
        "equilibrium": {"rho": args.rho, "U": args.u, "theta": args.theta},
        "conditions": {
            "i": {"passed": rep.cond_i.passed, **rep.cond_i.details},
            "ii": {"passed": rep.cond_ii.passed, **rep.cond_ii.details},
            "iii": {"passed": rep.cond_iii.passed, **rep.cond_iii.details},
        },
        "passed": rep.passed,
    }
    if not rep.passed:
        failing = [k for k, r in (("i", rep.cond_i), ("ii", rep.cond_ii), ("iii", rep.cond_iii)) if not r.passed]
        payload["failed_conditions"] = failing
        return _emit(payload, EXIT_STABILITY)
    return _emit(payload)


def _parse_overrides(pairs):
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise DomainError(f"override must look like key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def cmd_riemann(args) -> int:
    try:
        overrides = _parse_overrides(args.override)
        cfg = SimConfig.from_file(args.config, overrides)
    except FileNotFoundError:
        print(json.dumps({"error": f"no such file: {args.config}"}), file=sys.stderr)
        return EXIT_NOINPUT
    except (DomainError, TypeError, json.JSONDecodeError) as e:
        return _usage(str(e))
    try:
        result = run_riemann(cfg)
    except RealizabilityError as e:
        return _emit({"error": str(e), "kind": "RealizabilityError"}, EXIT_REALIZABILITY)
    return _emit(result.manifest["diagnostics"] | {"manifest": result.manifest_path})


def cmd_oracle(args) -> int:
    try:
        left = MacroState(args.rho_l, args.u_l, args.theta_l)
        right = MacroState(args.rho_r, args.u_r, args.theta_r)
        if args.grid_csv is not None:
            if args.cells < 2:
                raise DomainError("cells must be >= 2")
            return _oracle_grid(args, left, right)
        ref = free_streaming_reference(args.x, args.t, left, right)
    except DomainError as e:
        return _usage(str(e))
    return _emit({"x": args.x, "t": args.t, "rho": ref.rho, "U": ref.U, "theta": ref.theta, "q": ref.q})


def _oracle_grid(args, left: MacroState, right: MacroState) -> int:
    """Write the exact solution on a cell-centered grid in the solver CSV schema."""
    dx = (args.x_hi - args.x_lo) / args.cells
    rows = []
    for i in range(args.cells):
        x = args.x_lo + dx * (i + 0.5)
        ref = free_streaming_reference(x, args.t, left, right)
        m = [
            ref.rho,
            ref.rho * ref.U,
            ref.rho * (ref.U**2 + ref.theta),
            ref.rho * (ref.U**3 + 3 * ref.U * ref.theta) + 2 * ref.q,
        ]
        rows.append([x, *m, ref.rho, ref.U, ref.theta, ref.q])
    header = "x,M_0,M_1,M_2,M_3,rho,U,theta,q"
    with open(args.grid_csv, "w") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(format(v, ".17g") for v in row) + "\n")
    return _emit({"t": args.t, "cells": args.cells, "csv": args.grid_csv})


def _add_moment_flags(p):
    p.add_argument("--method", choices=("qmom", "eqmom"), required=True)
    p.add_argument("--n", type=int, required=True, help="number of nodes N")
    p.add_argument("--moments-file", help="whitespace-separated moment file")
    p.add_argument("moments", nargs="*", type=float, help="inline moment list")


def build_parser() -> _Parser:
    parser = _Parser(prog="qbmm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (("invert", cmd_invert), ("closure", cmd_closure), ("spectrum", cmd_spectrum)):
        p = sub.add_parser(name)
        _add_moment_flags(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("stability-check")
    p.add_argument("--model", choices=("bgk", "shakhov"), default="bgk")
    p.add_argument("--pr", type=float, default=1.0, help="Prandtl number (shakhov)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.set_defaults(fn=cmd_stability_check)

    p = sub.add_parser("riemann")
    p.add_argument("config", help="path to a flat JSON config file")
    p.add_argument("--override", action="append", metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.set_defaults(fn=cmd_riemann)

    p = sub.add_parser("oracle")
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--grid-csv", help="write the solution on a grid to this CSV instead")
    p.add_argument("--cells", type=int, default=1000)
    p.add_argument("--x-lo", type=float, default=-1.0)
    p.add_argument("--x-hi", type=float, default=1.0)
    p.add_argument("--rho-l", type=float, default=1.0)
    p.add_argument("--u-l", type=float, default=1.0)
    p.add_argument("--theta-l", type=float, default=1.0 / 3.0)
    p.add_argument("--rho-r", type=float, default=1.0)
    p.add_argument("--u-r", type=float, default=-1.0)
    p.add_argument("--theta-r", type=float, default=1.0 / 3.0)
    p.set_defaults(fn=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except QbmmError as e:
        print(json.dumps({"error": str(e), "kind": type(e).__name__}), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
