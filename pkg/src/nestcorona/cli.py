"""Command-line front end.

Exit codes: 0 on success, 2 when a lower-bound hypothesis fails (the report
is still written, with diagnostics), 1 on input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import serialization as ser
from .algebra import opnorm
from .approximation import nearest_in_algebra, nest_distance
from .exceptions import ConditionViolated, NestCoronaError, ResidualNotMet
from .factorization import cholesky_in_algebra, membership_residual, qr_in_algebra
from .flows import ModelDescriptor, f_projections, form_decomposition, fourier_strata
from .fourier_model import bilateral_descriptor, corona_epsilon_scalar, scalar_corona
from .interpolation import (
    corona_solve_general,
    corona_solve_nest,
    epsilon_report,
    toeplitz_corona,
)
from .selftest import run_selftest

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_INPUT, EXIT_CONDITION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nestcorona", description="Corona and interpolation toolkit for finite nest algebras.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def io(sp, needs_in=True):
        sp.add_argument("--in", dest="inp", required=needs_in, help="input JSON file")
        sp.add_argument("--out", help="output file (default: stdout)")

    io(sub.add_parser("distance", help="distance to the algebra"))
    io(sub.add_parser("nearest", help="nearest element of the algebra"))
    sp = sub.add_parser("factor", help="QR-type or Cholesky-type factorization")
    sp.add_argument("--kind", choices=["qr", "chol"], default="qr")
    io(sp)
    io(sub.add_parser("epsilon", help="lower-bound constants of an instance"))
    sp = sub.add_parser("corona", help="solve a corona instance")
    sp.add_argument("--mode", choices=["general", "nest", "p1", "toeplitz"], default="nest")
    sp.add_argument("--side", choices=["left", "right"], default="left")
    sp.add_argument("--P", choices=["P0", "P1"], default="P0", help="compression for --mode general")
    io(sp)
    sp = sub.add_parser("flow", help="strata, F projections and form decomposition")
    sp.add_argument("what", choices=["strata", "fproj", "form"])
    sp.add_argument("--bilateral", type=int, metavar="M", help="form of the size-M bilateral model")
    io(sp, needs_in=False)
    sp = sub.add_parser("hinf", help="scalar H-infinity corona")
    sp.add_argument("what", choices=["epsilon", "corona"])
    sp.add_argument("--m", type=int, default=64, help="section size")
    sp.add_argument("--deg-g", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--curve", help="CSV file for the residual curve")
    io(sp)
    sp = sub.add_parser("selftest", help="run the seeded invariant suite")
    sp.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    sp.add_argument("--reps", type=int, default=10)
    sp.add_argument("--out")
    return p


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ser.FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ser.FormatError(f"{path} is not valid JSON: {exc}") from exc


def _write(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _violation(exc: ConditionViolated) -> dict:
    return {
        "status": "condition_violated",
        "message": str(exc),
        "witness": exc.witness,
        "measured": exc.measured,
        "diagnostics": exc.diagnostics,
    }


def _cmd_distance(args):
    model, A = ser.single_from_json(_load(args.inp))
    return {"status": "ok", **nest_distance(A, model).as_dict()}


def _cmd_nearest(args):
    model, A = ser.single_from_json(_load(args.inp))
    B, mu = nearest_in_algebra(A, model)
    return {
        "status": "ok",
        "model": ser.model_to_json(model),
        "matrix": ser.matrix_to_json(B, model),
        "distance": mu,
        "achieved": opnorm(A - B),
    }


def _cmd_factor(args):
    model, S = ser.single_from_json(_load(args.inp))
    out = {"status": "ok", "kind": args.kind, "model": ser.model_to_json(model)}
    if args.kind == "qr":
        r = qr_in_algebra(S, model)
        out.update(U=ser.matrix_to_json(r.U, model), R=ser.matrix_to_json(r.R_or_C, model),
                   unitarity=r.unitarity)
    else:
        r = cholesky_in_algebra(S, model)
        out.update(C=ser.matrix_to_json(r.R_or_C, model))
    out.update(inverse=ser.matrix_to_json(r.inverse, model), residual=r.residual,
               membership=membership_residual(r, model))
    return out


def _cmd_epsilon(args):
    inst = ser.instance_from_json(_load(args.inp))
    return {"status": "ok", **epsilon_report(inst).as_dict()}


def _cmd_corona(args):
    inst = ser.instance_from_json(_load(args.inp))
    if args.mode == "general":
        cert = corona_solve_general(inst, P=args.P, side=args.side)
    elif args.mode == "nest":
        cert = corona_solve_nest(inst, "all_n", side=args.side)
    elif args.mode == "p1":
        cert = corona_solve_nest(inst, "P1_only", side=args.side)
    else:
        cert = toeplitz_corona(inst, side=args.side)
    return {
        "status": "ok",
        **cert.as_dict(),
        "model": ser.model_to_json(inst.model),
        "B": [ser.matrix_to_json(b, inst.model) for b in cert.B_list],
    }


def _cmd_flow(args):
    if args.what == "form":
        if args.bilateral is not None:
            desc = bilateral_descriptor(args.bilateral)
        else:
            if not args.inp:
                raise UsageError("flow form needs --in or --bilateral")
            doc = _load(args.inp)
            desc = ModelDescriptor(ser.model_from_json(ser.require(doc, "model")), ser.require(doc, "extents"))
        C = form_decomposition(desc)
        return {"status": "ok", "model": ser.model_to_json(desc.model),
                **{k: ser.matrix_to_json(v, desc.model) for k, v in C.items()}}
    if not args.inp:
        raise UsageError(f"flow {args.what} needs --in")
    doc = _load(args.inp)
    if args.what == "strata":
        model, A = ser.single_from_json(doc)
        strata = fourier_strata(A, model)
        return {"status": "ok", "model": ser.model_to_json(model),
                "strata": {str(n): ser.matrix_to_json(X, model) for n, X in strata.items()}}
    model = ser.model_from_json(ser.require(doc, "model") if "model" in doc else doc)
    F = f_projections(model)
    return {"status": "ok", "model": ser.model_to_json(model),
            "F": {str(n): ser.matrix_to_json(X, model) for n, X in F.items()}}


def _cmd_hinf(args):
    doc = _load(args.inp)
    f_list = [ser.trigpoly_from_json(f) for f in ser.require(doc, "symbols")]
    if args.what == "epsilon":
        e = corona_epsilon_scalar(f_list, args.m)
        return {"status": "ok", "eps": e.eps, "circle_min": e.circle_min, "m": e.m}
    try:
        res = scalar_corona(f_list, deg_g=args.deg_g, tol=args.tol, m=args.m)
    except ResidualNotMet as exc:
        if args.curve:
            _write(ser.curve_to_csv(exc.curve), args.curve)
        raise
    if args.curve:
        _write(ser.curve_to_csv(res.curve), args.curve)
    return {"status": "ok", **res.as_dict(), "g": [ser.trigpoly_to_json(g) for g in res.g_list]}


def _cmd_selftest(args):
    results = run_selftest(args.seed, args.reps)
    return {"status": "ok" if all(r["ok"] for r in results.values()) else "failed",
            "seed": args.seed, "checks": results}


COMMANDS = {
    "distance": _cmd_distance,
    "nearest": _cmd_nearest,
    "factor": _cmd_factor,
    "epsilon": _cmd_epsilon,
    "corona": _cmd_corona,
    "flow": _cmd_flow,
    "hinf": _cmd_hinf,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    """Entry point; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"nestcorona: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_INPUT
    out = getattr(args, "out", None)
    try:
        report = COMMANDS[args.verb](args)
    except ConditionViolated as exc:
        _write(ser.dumps(_violation(exc)), out)
        print(f"nestcorona: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except ResidualNotMet as exc:
        _write(ser.dumps({"status": "residual_not_met", "message": str(exc),
                          "curve": [list(c) for c in exc.curve]}), out)
        print(f"nestcorona: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, ser.FormatError, NestCoronaError, ValueError, KeyError, TypeError) as exc:
        print(f"nestcorona: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(ser.dumps(report), out)
    if args.verb == "selftest" and report["status"] != "ok":
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
