"""Command line interface: ``bpb correct | sweep | oracle | verify``.

The exit code is 0 exactly when every check the command performs passes.
"""

import argparse
import json
import sys

from . import io
from .errors import BPBError
from .harness import (
    brute_force_norm,
    brute_force_radius,
    emit_plotdata,
    emit_report,
    load_config,
    run_experiment,
)
from .linalg import OperatorClass, numerical_radius, operator_norm
from .spectral import normal_spectral_measure
from .verify import run_and_document, verify_document

ORACLE_TOL = 1e-3


def _fail(exc):
    print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
    return 1


def cmd_correct(args):
    T = io.read_matrix(args.input)
    x0 = io.read_vector(args.point)
    scale = 1.0
    if args.normalize:
        scale = operator_norm(T) if args.mode == "norm" else numerical_radius(T)[0]
        T = T / scale
    cls = OperatorClass.parse(args.cls)
    if args.dump_spectral:
        io.dump(io.spectral_to_json(normal_spectral_measure(T)), args.dump_spectral)
    try:
        doc, result = run_and_document(T, x0, args.epsilon, args.mode, cls, p=args.schatten,
                                     exact=args.exact_point, scale=scale)
    except BPBError as exc:
        if args.trace and exc.details.get("trace") is not None:
            io.dump(exc.details["trace"].to_dict(), args.trace)
        return _fail(exc)
    io.dump(doc, args.out)
    if args.trace:
        trace = result.trace
        io.dump({"converged": True, "steps": []} if trace is None else trace.to_dict(), args.trace)
    bad = result.certificate.failures()
    for name in bad:
        print(f"FAIL  {name}", file=sys.stderr)
    return 0 if not bad else 1


def cmd_sweep(args):
    cfg = load_config(args.config)
    report = run_experiment(cfg)
    emit_report(report, args.out)
    if args.plotdata:
        emit_plotdata(report, args.plotdata)
    for r in report.rows:
        if r.failed:
            print(f"FAIL  {r.mode} {r.cls} dim={r.dim} eps={r.epsilon}: {r.reasons}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_oracle(args):
    T = io.read_matrix(args.input)
    out = {"dim": int(T.shape[0]), "operator_norm": operator_norm(T),
           "numerical_radius": numerical_radius(T)[0]}
    ok = True
    if T.shape[0] <= 3:
        out["brute_force_norm"] = brute_force_norm(T, args.grid)
        out["brute_force_radius"] = brute_force_radius(T, args.grid)
        out["norm_agrees"] = abs(out["brute_force_norm"] - out["operator_norm"]) <= ORACLE_TOL
        out["radius_agrees"] = abs(out["brute_force_radius"] - out["numerical_radius"]) <= ORACLE_TOL
        ok = out["norm_agrees"] and out["radius_agrees"]
    print(json.dumps(out, indent=1))
    return 0 if ok else 1


def cmd_verify(args):
    doc = io.load(args.result)
    checks = verify_document(doc)
    for c in checks:
        print(c.line())
    return 0 if all(c.ok for c in checks) else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="bpb", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("correct", help="correct an almost-attaining operator")
    c.add_argument("--mode", choices=("norm", "nu"), required=True)
    c.add_argument("--class", dest="cls", required=True,
                   help="general, positive, selfadjoint, antisymmetric, unitary, normal, schatten")
    c.add_argument("--schatten", type=float, default=None, metavar="P")
    c.add_argument("--epsilon", type=float, required=True)
    c.add_argument("--input", required=True, help="matrix JSON")
    c.add_argument("--point", required=True, help="vector JSON")
    c.add_argument("--exact-point", action="store_true")
    c.add_argument("--normalize", action="store_true",
                   help="divide T by its norm (norm mode) or numerical radius (nu mode)")
    c.add_argument("--out", required=True)
    c.add_argument("--trace", default=None, help="write the iteration trace here")
    c.add_argument("--dump-spectral", default=None, metavar="PATH",
                   help="write the spectral measure of T (normal T only)")
    c.set_defaults(func=cmd_correct)

    s = sub.add_parser("sweep", help="run an experiment grid")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help=".csv or .json")
    s.add_argument("--plotdata", default=None)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle", help="norm and numerical radius with brute-force cross-check")
    o.add_argument("--input", required=True)
    o.add_argument("--grid", type=int, default=1000)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="re-check a result file")
    v.add_argument("--result", required=True)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BPBError as exc:
        return _fail(exc)
    except (OSError, ValueError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
