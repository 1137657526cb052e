"""Command line interface for the experiment drivers.

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical
failures.
"""

import argparse
import sys

from .errors import IndefiniteSystemError, MpigaError, NumericalError, ParameterError
from .experiments import ExperimentConfig, run_convergence, run_eta_sweep, run_jump_study, run_solve


def _add_common(sub):
    sub.add_argument("--geometry", default="square-6-bilinear",
                     help="builtin fixture name or geometry JSON path")
    sub.add_argument("--method", default="approx-c1", choices=("approx-c1", "nitsche"))
    sub.add_argument("--p", type=int, default=3, help="polynomial degree")
    sub.add_argument("--r", type=int, default=-1, help="regularity (default p-1)")
    sub.add_argument("--levels", default="4,8,16,32",
                     help="comma separated element counts per level")
    sub.add_argument("--eta-mult", type=float, default=4.0,
                     help="stability multiplier for Nitsche runs")
    sub.add_argument("--h0", type=float, default=1.0 / 16.0,
                     help="coarse mesh size freezing the stability weight")
    sub.add_argument("--bc", default="", choices=("", "gn", "gl"),
                     help="boundary condition tag (default per fixture)")
    sub.add_argument("--out", default="", help="output CSV path (stdout if empty)")


def _config(args):
    try:
        levels = tuple(int(tok) for tok in args.levels.split(",") if tok.strip())
    except ValueError as exc:
        raise ParameterError(f"cannot parse levels {args.levels!r}: {exc}") from exc
    return ExperimentConfig(
        geometry=args.geometry,
        method=args.method,
        p=args.p,
        r=args.r,
        levels=levels,
        bc=args.bc,
        eta_mult=args.eta_mult,
        h0=args.h0,
        out=args.out,
    ).resolve()


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mpiga",
        description="Biharmonic multi-patch experiments: approximate C1 vs Nitsche coupling",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("solve", "solve one level and report errors"),
        ("converge", "convergence study over refinement levels"),
        ("sweep-eta", "error versus stability parameter at fixed mesh"),
        ("jump", "normal-derivative jump norms under refinement"),
    ):
        _add_common(subs.add_parser(name, help=helptext))

    args = parser.parse_args(argv)
    try:
        config = _config(args)
        if args.command == "solve":
            _, text = run_solve(config)
        elif args.command == "converge":
            _, text = run_convergence(config)
        elif args.command == "sweep-eta":
            config.method = "nitsche"
            _, text = run_eta_sweep(config)
        else:
            config.method = "approx-c1"
            _, text = run_jump_study(config)
    except (ParameterError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (IndefiniteSystemError, NumericalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except MpigaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.out:
        print(text, end="")
    else:
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
