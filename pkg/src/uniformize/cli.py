"""Command-line front end.

Exit codes: 0 success, 1 input or computation error (JSON reason on
stderr), 2 verification failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import suites
from .connection import build_genus0_connection, build_hyperelliptic_connection
from .curve import CurveFunction, curve_from_json, residue_sum_of_dlog
from .errors import UniformizeError
from .fuchsian import (
    FuchsianQ,
    OrbifoldSpec,
    build_orbifold_q,
    build_q38,
    whittaker_w,
    whittaker_z,
)
from .jets import DEFAULT_DEGREE_CAP, derive_connection_ode, derive_psi_ode
from .numerics import PathSpec, elliptic_order_check, monodromy


# -- canonical output ---------------------------------------------------------
def _fmt_float(x):
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return "%.17g" % x


def dumps(obj, indent=0):
    """JSON with ``%.17g`` floats and insertion-ordered keys."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        obj = int(obj)
    if isinstance(obj, np.bool_):
        return json.dumps(bool(obj))
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag], indent)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str, bool, np.floating, np.integer)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v, indent + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, out):
    text = dumps(obj) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# -- input specs --------------------------------------------------------------
def potential_from_json(spec) -> FuchsianQ:
    """Build a potential from ``{"orbifold": ...}``, ``{"whittakerZ": g}``,
    ``{"whittakerW": g}``, ``{"q38": {"P" | "E", "A"}}`` or ``{"Q": text, "var": v}``."""
    if "orbifold" in spec:
        return build_orbifold_q(OrbifoldSpec.from_json(spec["orbifold"]), spec.get("var", "x"))
    if "whittakerZ" in spec:
        return whittaker_z(int(spec["whittakerZ"]))
    if "whittakerW" in spec:
        return whittaker_w(int(spec["whittakerW"]))
    if "q38" in spec:
        d = spec["q38"]
        P = d.get("P")
        if isinstance(P, list):
            P = " + ".join(f"({c})*z^{i}" for i, c in enumerate(P))
        return build_q38(E=d.get("E"), A=d.get("A", 0), P=P)
    if "Q" in spec:
        curve = curve_from_json(spec["curve"]) if "curve" in spec else None
        var = curve.z if curve is not None else spec.get("var", "x")
        Q = CurveFunction.parse(spec["Q"], curve, var)
        return FuchsianQ(Q, "custom", curve)
    raise ValueError("potential input needs one of orbifold, whittakerZ, whittakerW, q38, Q")


def connection_from_spec(spec):
    """``(connection, potential)`` from a connection file."""
    variant = spec.get("variant", "final")
    if variant == "genus0":
        Q = potential_from_json(spec)
        return build_genus0_connection(Q, spec.get("R", "0")), Q
    curve = curve_from_json(spec["curve"])
    if "potential" in spec:
        Q = potential_from_json(spec["potential"])
    else:
        Q = build_q38(P=curve.P, A=spec.get("A", 0), var=curve.z)
    Q = dataclasses.replace(Q, curve=curve)
    conn = build_hyperelliptic_connection(curve, spec.get("cs", ["0"] * curve.genus), variant)
    return conn, Q


# -- commands -----------------------------------------------------------------
def cmd_derive_ode(args):
    conn, Q = connection_from_spec(_load(args.connection))
    ode = derive_connection_ode(conn, Q, degree_cap=args.degree_cap)
    _emit(ode.to_json(), args.out)
    return 0


def cmd_derive_psi_ode(args):
    Q = potential_from_json(_load(args.potential))
    ode = derive_psi_ode(Q, args.R, degree_cap=args.degree_cap)
    _emit(ode.to_json(), args.out)
    return 0


def cmd_residues(args):
    curve = curve_from_json(_load(args.curve))
    f = CurveFunction.parse(args.differential, curve)
    total = residue_sum_of_dlog(f, args.weight)
    if args.out:
        _emit({"differential": args.differential, "weight": args.weight, "sum": total}, args.out)
    sys.stdout.write(f"{total}\n")
    return 0


def cmd_monodromy(args):
    Q = potential_from_json(_load(args.potential))
    path = PathSpec.from_json(_load(args.path))
    M = monodromy(Q, path)
    report = {"matrix": [[complex(v) for v in row] for row in M], "trace": complex(np.trace(M)),
              "det": complex(np.linalg.det(M))}
    code = 0
    if args.order:
        ok, res = elliptic_order_check(M, args.order, args.tol or 1e-6)
        report["order"] = args.order
        report["residual"] = res
        report["passed"] = bool(ok)
        code = 0 if ok else 2
    _emit(report, args.out)
    return code


def cmd_verify(args):
    opts = {"tol": args.tol, "samples": args.samples, "terms": args.terms, "seed": args.seed,
            "degree_cap": args.degree_cap}
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    reports = [suites.run_suite(n, **opts) for n in names]
    out = reports[0] if len(reports) == 1 else {"passed": all(r["passed"] for r in reports), "suites": reports}
    _emit(out, args.out)
    return 0 if all(r["passed"] for r in reports) else 2


def build_parser():
    p = argparse.ArgumentParser(prog="uniformize", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the JSON artifact here instead of stdout")
        sp.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)

    d = sub.add_parser("derive-ode", help="autonomous ODE of a connection")
    d.add_argument("--connection", required=True)
    common(d)
    d.set_defaults(func=cmd_derive_ode)

    d = sub.add_parser("derive-psi-ode", help="autonomous ODE of a 1-differential")
    d.add_argument("--potential", required=True)
    d.add_argument("--R", default=None, help="xdot = R psi (default 1)")
    common(d)
    d.set_defaults(func=cmd_derive_psi_ode)

    d = sub.add_parser("residues", help="degree of the divisor of f (dz)^k")
    d.add_argument("--curve", required=True)
    d.add_argument("--differential", required=True)
    d.add_argument("--weight", type=int, default=1)
    d.add_argument("--out")
    d.set_defaults(func=cmd_residues)

    d = sub.add_parser("monodromy", help="monodromy matrix along a closed path")
    d.add_argument("--potential", required=True)
    d.add_argument("--path", required=True)
    d.add_argument("--order", type=int, default=0)
    d.add_argument("--tol", type=float)
    d.add_argument("--out")
    d.set_defaults(func=cmd_monodromy)

    d = sub.add_parser("verify", help="run a named verification suite")
    d.add_argument("--suite", required=True, choices=list(suites.SUITES) + ["all"])
    d.add_argument("--tol", type=float)
    d.add_argument("--samples", type=int)
    d.add_argument("--terms", type=int)
    d.add_argument("--seed", type=int)
    common(d)
    d.set_defaults(func=cmd_verify)
    return p


def _fail(exc):
    if isinstance(exc, UniformizeError):
        info = exc.to_dict()
    else:
        info = {"error": "input-error", "type": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(info, sort_keys=True) + "\n")
    return 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for opt in ("samples", "terms"):
        v = getattr(args, opt, None)
        if v is not None and v < 1:
            return _fail(ValueError(f"--{opt} must be positive"))
    if getattr(args, "terms", None) is not None and args.terms < 10:
        return _fail(ValueError("--terms must be at least 10"))
    try:
        return args.func(args)
    except (UniformizeError, OSError, ValueError, KeyError, json.JSONDecodeError, ZeroDivisionError) as exc:
        return _fail(exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
