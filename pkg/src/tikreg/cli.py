"""``tikreg`` command line.

Exit codes: 0 success, 2 invalid arguments, 3 numeric failure,
4 partial sweep failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import InvalidInputError, NumericFailure, TikregError
from .experiments import cmd_matrix_demo, cmd_ocp, cmd_sweep

EXIT_OK, EXIT_ARGS, EXIT_NUMERIC, EXIT_PARTIAL = 0, 2, 3, 4

log = logging.getLogger("tikreg")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _add_ocp_overrides(p: argparse.ArgumentParser):
    p.add_argument("--quad-points", type=int, default=1000, help="quadrature grid size (default 1000)")
    p.add_argument("--steps", type=int, default=2000, help="RK4 steps (default 2000)")
    p.add_argument("--modes", type=int, default=12, help="CRAB sine modes (default 12)")
    p.add_argument("--nodes", type=int, default=15, help="direct-method nodes (default 15)")
    p.add_argument("--de-np", type=int, default=None, help="DE population size (default 120)")
    p.add_argument("--de-f", type=float, default=None, help="DE differential weight (default 0.8)")
    p.add_argument("--de-cr", type=float, default=None, help="DE crossover rate (default 0.7)")
    p.add_argument("--de-gens", type=int, default=None, help="DE generations (default 300)")


def _ocp_kwargs(args) -> dict:
    de = {}
    for flag, key in (("de_np", "NP"), ("de_f", "F"), ("de_cr", "CR"), ("de_gens", "Nmax")):
        v = getattr(args, flag)
        if v is not None:
            de[key] = v
    return {
        "quad_points": args.quad_points,
        "steps": args.steps,
        "modes": args.modes,
        "nodes": args.nodes,
        "de": de or None,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tikreg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix-demo", help="condition number study of A(mu) = [[1,1],[1,1+mu]]")
    p.add_argument("--mu", type=float, default=1e-6)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--matrix", default=None, help="read A from a matrix file instead of A(mu)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("ocp", help="solve the regularized control problem")
    p.add_argument("--method", choices=("exact", "crab", "direct"), required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_ocp_overrides(p)

    p = sub.add_parser("sweep", help="exact/crab/direct over eps x seeds")
    p.add_argument("--eps", type=_float_list, required=True, help="e.g. '1,0.04,0.001'")
    p.add_argument("--seeds", type=_int_list, required=True, help="e.g. '0,1,2'")
    p.add_argument("--out", required=True)
    _add_ocp_overrides(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "matrix-demo":
            report = cmd_matrix_demo(args.mu, args.eps, args.out, matrix_path=args.matrix)
        elif args.command == "ocp":
            report = cmd_ocp(args.method, args.eps, args.seed, args.out, **_ocp_kwargs(args))
        else:
            report = cmd_sweep(args.eps, args.seeds, args.out, **_ocp_kwargs(args))
    except InvalidInputError as exc:
        print(f"tikreg: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (NumericFailure, FloatingPointError) as exc:
        print(f"tikreg: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TikregError as exc:
        print(f"tikreg: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for path in report.outputs:
        log.info("wrote %s", path)
    if report.command == "sweep" and report.results.get("failed"):
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
