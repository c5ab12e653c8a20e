"""Command-line front end.

Exit status: 0 when every check passes, 1 when any check fails, 2 for
usage or configuration errors.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import ConfigurationError, DomainError, SolitonLabError
from .suites import SUITES, VERSION, RunConfig, emit_report, run_suite
from .zoo import PARAMS, get_geometry, list_geometries, parse_metric_arg

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _tol_pair(s):
    name, eq, val = s.partition("=")
    if not eq or not name:
        raise argparse.ArgumentTypeError(f"expected check=value, got {s!r}")
    try:
        return name.strip(), float(val)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance {val!r} for {name}") from exc


def _point(s):
    try:
        vals = [float(t) for t in s.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad point {s!r}") from exc
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"point needs 4 comma-separated values, got {len(vals)}")
    return np.array(vals)


def build_parser():
    p = _Parser(prog="solitonlab", description="Numerical checks of shrinking Ricci soliton "
                "identities on 4-dimensional test geometries.")
    p.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a check suite and write a report")
    v.add_argument("--metric", required=True, help="name[:k=v,...], see list-metrics")
    v.add_argument("--suite", required=True, help="suite name, see list-suites")
    v.add_argument("--points", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--h", type=float, default=None, help="finite-difference step")
    v.add_argument("--tol", type=_tol_pair, action="append", default=[],
                   metavar="CHECK=VALUE", help="per-check tolerance override, repeatable")
    v.add_argument("--out", required=True, help="report path, '-' for stdout")
    v.add_argument("--format", choices=["json", "csv-summary"], default="json")
    v.add_argument("--timing", action="store_true",
                   help="include wall time in the JSON report (breaks byte stability)")

    sub.add_parser("list-metrics", help="list zoo geometries and their parameters")
    sub.add_parser("list-suites", help="list suites and their checks")

    s = sub.add_parser("spectrum", help="print W+ and W- eigenvalues and kappa at a point")
    s.add_argument("--metric", required=True)
    s.add_argument("--point", required=True, type=_point, help="x1,x2,x3,x4")
    s.add_argument("--h", type=float, default=None)
    return p


def _verify(args):
    name, params = parse_metric_arg(args.metric)
    cfg = RunConfig(metric=name, suite=args.suite, points=args.points, seed=args.seed,
                    params=params, h=args.h, tolerances=dict(args.tol), out=args.out)
    report = run_suite(cfg)
    emit_report(report, args.out, args.format, args.timing)
    return EXIT_OK if report.passed else EXIT_FAIL


def _list_metrics(args):
    for n in list_geometries():
        ps = ", ".join(f"{k}:{t.__name__}" for k, t in PARAMS[n].items())
        print(f"{n}" + (f" ({ps})" if ps else ""))
    return EXIT_OK


def _list_suites(args):
    for n, checks in SUITES.items():
        if n == "all":
            print("all: every check above")
        else:
            print(f"{n}: {', '.join(checks)}")
    return EXIT_OK


def _spectrum(args):
    from .curvature import curvature_package
    from .fields import DiffConfig
    from .hermitian import conformal_scalar_curvature

    name, params = parse_metric_arg(args.metric)
    spec = get_geometry(name, **params)
    cfg = DiffConfig() if args.h is None else DiffConfig(h=args.h)
    x = args.point
    spec.domain.check(x)
    pkg = curvature_package(spec.g, x, None, cfg)
    print("W+ eigenvalues: " + " ".join(format(v, ".10g") for v in pkg.wplus_eigenvalues))
    print("W- eigenvalues: " + " ".join(format(v, ".10g") for v in pkg.wminus_eigenvalues))
    if spec.J is not None:
        print(f"kappa: {conformal_scalar_curvature(spec.g, spec.J, x, cfg):.10g}")
    else:
        print("kappa: n/a (no complex structure)")
    return EXIT_OK


COMMANDS = {"verify": _verify, "list-metrics": _list_metrics, "list-suites": _list_suites,
            "spectrum": _spectrum}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"solitonlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, DomainError) as exc:
        print(f"solitonlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"solitonlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolitonLabError as exc:
        print(f"solitonlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
