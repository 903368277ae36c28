"""Command-line front end.

Exit codes: 0 ran, 2 invalid input, 3 capacity exceeded, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import accessors, states
from .criteria import (
    ALL_CRITERIA,
    DEFAULT_TOL,
    canonical_criterion,
    default_phi,
    evaluate,
)
from .errors import BracketError, CapacityError, DataError, DomainError, ShapeError, UnsupportedError
from .hilbert import LocalPair, check_dense
from .measurements import plan as build_plan
from .thresholds import (
    FamilySpec,
    bisect_threshold,
    canonical_family,
    closed_form,
    closed_form_threshold,
    scan_region,
)

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_NUMERIC = 0, 2, 3, 4


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from exc
    return lo, hi


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj, output: str | None) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", output)


def _family_state(args):
    kind = canonical_family(args.family)
    if args.n is None:
        raise DomainError("--family needs --n")
    if kind == "ghz-w-noise":
        alpha, beta = args.alpha or 0.0, args.beta or 0.0
        acc = accessors.ghz_w(args.n, alpha, beta)
        desc = {"family": kind, "n": args.n, "alpha": alpha, "beta": beta}
    else:
        if args.visibility is None:
            raise DomainError(f"--family {kind} needs --visibility")
        v = args.visibility
        acc = accessors.w_noise(args.n, v) if kind == "w-noise" else accessors.ghz_noise(args.n, args.d, v)
        desc = {"family": kind, "n": args.n, "d": args.d, "visibility": v, "noise_weight": 1 - v}
    if args.dense:
        check_dense(acc.dims)
        return acc.to_dense(), desc
    return acc, desc


def _local_pair(args, n) -> LocalPair | None:
    if args.x is None and args.y is None:
        return None
    return LocalPair.uniform(n, args.x if args.x is not None else 0, args.y if args.y is not None else 1)


def cmd_evaluate(args) -> int:
    if (args.input is None) == (args.family is None):
        raise DomainError("give exactly one state source: --input FILE or --family NAME")
    if args.input is not None:
        rho = states.load_json(args.input)
        diag = states.validate(rho, check_psd=args.check_psd)
        if not diag.ok and not args.force:
            raise DataError(f"{args.input}: {diag.problems[0]} (use --force to evaluate anyway)")
        state, desc = rho, {"input": str(args.input), "dims": list(rho.dims)}
    else:
        state, desc = _family_state(args)
    dims = state.dims
    phi = None
    if args.phi1 is not None or args.phi2 is not None:
        d1, d2 = default_phi(dims)
        phi = (args.phi1 or d1, args.phi2 or d2)
    lp = _local_pair(args, len(dims))
    names = [canonical_criterion(c) for c in args.criterion.split(",")]
    reports = [evaluate(c, state, lp=lp, phi=phi, tol=args.tol).to_dict() for c in names]
    _dump({"state": desc, "reports": reports}, args.output)
    return EXIT_OK


def cmd_threshold(args) -> int:
    family = FamilySpec(args.family, args.n, args.d, args.alpha or 0.0)
    criterion = canonical_criterion(args.criterion)
    phi = (args.phi1, args.phi2) if args.phi1 and args.phi2 else None
    exact = closed_form(family, criterion)
    if exact is not None and not args.force_bisect:
        out = closed_form_threshold(family, criterion).to_dict()
    else:
        bis = bisect_threshold(family, criterion, args.bracket, args.tol, phi=phi)
        if exact is None:
            out = bis.to_dict()
        else:
            cf = closed_form_threshold(family, criterion)
            out = {
                "closed_form": cf.to_dict(),
                "bisection": bis.to_dict(),
                "difference": bis.visibility - cf.visibility,
            }
    _dump(out, args.output)
    return EXIT_OK


def cmd_scan(args) -> int:
    sa = args.steps_alpha or args.steps
    sb = args.steps_beta or args.steps
    grid = scan_region(args.n, args.criteria.split(","), (sa, sb), tol=args.tol)
    _emit(grid.to_csv(), args.output)
    return EXIT_OK


def cmd_plan(args) -> int:
    phi = None
    if args.phi1 is not None or args.phi2 is not None:
        phi = (args.phi1 or (0,) * args.n, args.phi2 or (1,) * args.n)
    p = build_plan(args.criterion, args.n, lp=_local_pair(args, args.n), phi=phi)
    _dump(p.to_dict(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entwit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    crit_help = f"one of {', '.join(ALL_CRITERIA)} (huber3 accepted)"

    def family_flags(p):
        p.add_argument("--family", help="w-noise, ghz-noise, qudit-ghz-noise or ghz-w-noise")
        p.add_argument("--n", type=int)
        p.add_argument("--d", type=int, default=2)
        p.add_argument("--alpha", type=float)

    def label_flags(p):
        p.add_argument("--x", type=int, help="local level x on every site (default 0)")
        p.add_argument("--y", type=int, help="local level y on every site (default 1)")
        p.add_argument("--phi1", type=_int_list, help="theorem2 label, e.g. 0,0,0")
        p.add_argument("--phi2", type=_int_list, help="theorem2 label, e.g. 1,1,1")

    p = sub.add_parser("evaluate", help="run criteria on one state")
    p.add_argument("--input", help="density matrix JSON ({dims, re, im})")
    family_flags(p)
    p.add_argument("--visibility", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--criterion", default="theorem1", help=f"comma-separated; {crit_help}")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--dense", action="store_true", help="materialize family states densely")
    p.add_argument("--check-psd", action="store_true")
    p.add_argument("--force", action="store_true", help="evaluate even if validation fails")
    p.add_argument("--output")
    label_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("threshold", help="detection threshold along a family")
    family_flags(p)
    p.add_argument("--criterion", required=True, help=crit_help)
    p.add_argument("--force-bisect", action="store_true")
    p.add_argument("--bracket", type=_float_pair)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--output")
    label_flags(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("scan", help="GHZ-W region scan to CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--steps-alpha", type=int)
    p.add_argument("--steps-beta", type=int)
    p.add_argument("--criteria", default="theorem1,huber_iii")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--output")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("plan", help="local measurement plan")
    p.add_argument("--criterion", required=True, help=crit_help)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output")
    label_flags(p)
    p.set_defaults(func=cmd_plan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "threshold" and (args.family is None or args.n is None):
        print("entwit: threshold needs --family and --n", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"entwit: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except BracketError as exc:
        print(f"entwit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, DomainError, ShapeError, UnsupportedError, OSError) as exc:
        print(f"entwit: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
