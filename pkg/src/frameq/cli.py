"""Command line front end.

Subcommands cover the identity checker (``check``), scenario execution
(``run``), and flag-driven one-off runs (``adapted``, ``spectrum``,
``shift``, ``evolve``) that assemble a scenario in memory and go through
the same validated path as ``run``.

Exit codes: 0 all checks passed, 1 a check failed, 2 input error.  The
environment variable FRAMEQ_THREADS caps threading in the numerical
backends; it is applied before any of them load, which is why the heavy
imports here sit inside functions.
"""

from __future__ import annotations

import argparse
import os
import sys

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _cap_threads() -> None:
    cap = os.environ.get("FRAMEQ_THREADS")
    if not cap:
        return
    try:
        if int(cap) < 1:
            raise ValueError
    except ValueError:
        print(f"error: FRAMEQ_THREADS={cap!r} is not a positive integer", file=sys.stderr)
        raise SystemExit(2)
    for var in _THREAD_VARS:
        os.environ[var] = cap


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _coordinates(text: str) -> list:
    """Parse "q,phi:6.2832" into schema coordinate entries."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise argparse.ArgumentTypeError("empty coordinate name")
        if ":" in part:
            name, _, period = part.partition(":")
            try:
                out.append({"name": name.strip(), "period": float(period)})
            except ValueError:
                raise argparse.ArgumentTypeError(
                    f"bad period in coordinate {part!r}"
                ) from None
        else:
            out.append(part)
    return out


def _axis(text: str) -> dict:
    """Parse "a,b,n[,bc[,scheme]]" into a schema axis entry."""
    parts = [p.strip() for p in text.split(",")]
    if not 3 <= len(parts) <= 5:
        raise argparse.ArgumentTypeError(
            f"axis {text!r} is not of the form a,b,n[,bc[,scheme]]"
        )
    try:
        entry = {"a": float(parts[0]), "b": float(parts[1]), "n": int(parts[2])}
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad axis numbers in {text!r}") from None
    if len(parts) > 3:
        entry["bc"] = parts[3]
    if len(parts) > 4:
        entry["scheme"] = parts[4]
    return entry


def _float_list(text: str) -> list:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _exprs(text: str) -> list:
    return [p.strip() for p in text.split(",")]


def _named_expr(text: str) -> tuple:
    name, sep, expr = text.partition("=")
    if not sep or not name.strip() or not expr.strip():
        raise argparse.ArgumentTypeError(
            f"observable {text!r} is not of the form name=expression"
        )
    return name.strip(), expr.strip()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frameq",
        description="Frame-dependent mechanics: exact identity checks and grid runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run the exact identity suites")
    check.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    check.add_argument(
        "--count",
        type=_positive_int,
        default=200,
        help="cases per suite (default 200)",
    )
    check.add_argument(
        "--corrupt-divergence",
        dest="corrupt",
        action="store_true",
        help=argparse.SUPPRESS,
    )
    check.add_argument("--report", help="also write the summary to this file")
    check.set_defaults(func=_cmd_check)

    run = sub.add_parser("run", help="execute a scenario file or builtin")
    run.add_argument("scenario", help="path to a scenario JSON file, or a builtin name")
    run.set_defaults(func=_cmd_run)

    adapted = sub.add_parser(
        "adapted", help="integrate frame characteristics to adapted coordinates"
    )
    adapted.add_argument("--coords", type=_coordinates, required=True)
    adapted.add_argument(
        "--frame",
        type=_exprs,
        required=True,
        help="comma-separated component expressions in (t, q)",
    )
    adapted.add_argument("--t0", type=float, default=0.0)
    adapted.add_argument("--t1", type=float, required=True)
    adapted.add_argument(
        "--point",
        type=_float_list,
        action="append",
        required=True,
        help="starting position, comma-separated; repeatable",
    )
    adapted.add_argument("--tolerance", type=float, help="integration tolerance")
    adapted.add_argument("--out", help="write the flow table to this CSV file")
    adapted.set_defaults(func=_cmd_adapted)

    spectrum = sub.add_parser("spectrum", help="lowest eigenpairs of an energy operator")
    _grid_flags(spectrum)
    spectrum.add_argument("--frame", type=_exprs, help="frame component expressions")
    spectrum.add_argument(
        "--pairs", type=_positive_int, default=6, help="eigenpair count (default 6)"
    )
    spectrum.add_argument(
        "--radial", type=int, help="angular number for a radial operator"
    )
    spectrum.add_argument(
        "--radial-convention",
        choices=("halfform", "measure"),
        help="radial weighting (default halfform)",
    )
    _expect_flags(spectrum)
    spectrum.add_argument("--out", help="write the spectrum to this CSV file")
    spectrum.set_defaults(func=_cmd_spectrum)

    shift = sub.add_parser("shift", help="eigenpairs after a change of frame")
    _grid_flags(shift)
    shift.add_argument("--frame", type=_exprs, help="source frame (default zero)")
    shift.add_argument("--frame-to", type=_exprs, required=True, dest="frame_to")
    shift.add_argument("--pairs", type=_positive_int, default=6)
    shift.add_argument(
        "--shift-tol",
        type=float,
        help="check predicted eigenvalue shifts to this tolerance",
    )
    _expect_flags(shift)
    shift.add_argument("--boost", type=_float_list, help="boost amounts per axis")
    shift.add_argument(
        "--boost-deficit",
        type=float,
        default=1e-8,
        help="allowed overlap deficit for --boost (default 1e-8)",
    )
    shift.add_argument("--out", help="write the spectrum to this CSV file")
    shift.set_defaults(func=_cmd_shift)

    evolve = sub.add_parser("evolve", help="Crank-Nicolson time evolution")
    _grid_flags(evolve)
    evolve.add_argument("--frame", type=_exprs)
    evolve.add_argument("--t0", type=float, default=0.0)
    evolve.add_argument("--t1", type=float, required=True)
    evolve.add_argument("--dt", type=float, required=True)
    evolve.add_argument(
        "--eigenstate", type=int, help="start from this eigenstate index"
    )
    evolve.add_argument(
        "--gaussian-center", type=_float_list, help="packet center per axis"
    )
    evolve.add_argument("--gaussian-width", type=float)
    evolve.add_argument(
        "--gaussian-momentum", type=_float_list, help="packet momentum per axis"
    )
    evolve.add_argument(
        "--observe",
        type=_named_expr,
        action="append",
        help="track name=expression; repeatable",
    )
    evolve.add_argument("--norm-tol", type=float, help="check norm drift")
    evolve.add_argument("--out", help="write the evolution table to this CSV file")
    evolve.add_argument("--snapshot", help="write the final state to this file")
    evolve.set_defaults(func=_cmd_evolve)

    return parser


def _grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--coords", type=_coordinates, required=True)
    p.add_argument(
        "--axis",
        type=_axis,
        action="append",
        required=True,
        help="grid axis a,b,n[,bc[,scheme]]; repeatable",
    )
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--potential", help="builtin name or expression")


def _expect_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--expect", type=_float_list, help="expected lowest eigenvalues"
    )
    p.add_argument("--expect-tol", type=float, help="tolerance for --expect")


def _print_result(result) -> int:
    for line in result.lines:
        print(line)
    for path in result.outputs:
        print(f"wrote {path}")
    return 0 if result.passed else 1


def _run_dict(data: dict) -> int:
    from .scenarios import run_scenario

    return _print_result(run_scenario(data))


def _cmd_check(args) -> int:
    from .verify import verify_identities

    summary = verify_identities(args.seed, args.count, corrupt_divergence=args.corrupt)
    text = str(summary)
    print(text)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.report}")
    return 0 if summary.passed else 1


def _cmd_run(args) -> int:
    from .scenarios import run_scenario

    return _print_result(run_scenario(args.scenario))


def _cmd_adapted(args) -> int:
    data = {
        "kind": "adapted-coords",
        "chart": {"coordinates": args.coords},
        "frame": args.frame,
        "time": {"t0": args.t0, "t1": args.t1},
        "initial": {"points": args.point},
    }
    if args.tolerance is not None:
        data["tolerances"] = {"flow": args.tolerance}
    if args.out:
        data["output"] = {"flow": args.out}
    return _run_dict(data)


def _base_grid_dict(args, kind: str) -> dict:
    data = {
        "kind": kind,
        "chart": {"coordinates": args.coords},
        "grid": {"axes": args.axis},
        "hamiltonian": {"mass": args.mass},
    }
    if args.potential:
        data["hamiltonian"]["potential"] = args.potential
    if getattr(args, "frame", None):
        data["frame"] = args.frame
    return data


def _attach_expect(data: dict, args) -> None:
    if args.expect is not None or args.expect_tol is not None:
        data["expect"] = {}
        if args.expect is not None:
            data["expect"]["values"] = args.expect
        if args.expect_tol is not None:
            data["expect"]["tolerance"] = args.expect_tol


def _cmd_spectrum(args) -> int:
    data = _base_grid_dict(args, "spectrum")
    data["eigenpairs"] = args.pairs
    if args.radial is not None:
        data["radial"] = {"angular": args.radial}
        if args.radial_convention:
            data["radial"]["convention"] = args.radial_convention
    _attach_expect(data, args)
    if args.out:
        data["output"] = {"spectrum": args.out}
    return _run_dict(data)


def _cmd_shift(args) -> int:
    data = _base_grid_dict(args, "frame-shift")
    data["frame_to"] = args.frame_to
    data["eigenpairs"] = args.pairs
    if args.shift_tol is not None:
        data["tolerances"] = {"shift": args.shift_tol}
    _attach_expect(data, args)
    if args.boost is not None:
        data["checks"] = {
            "boost_overlap": {
                "boost": args.boost,
                "deficit_tolerance": args.boost_deficit,
            }
        }
    if args.out:
        data["output"] = {"spectrum": args.out}
    return _run_dict(data)


def _cmd_evolve(args) -> int:
    data = _base_grid_dict(args, "evolve")
    data["time"] = {"t0": args.t0, "t1": args.t1, "dt": args.dt}
    initial = {}
    if args.eigenstate is not None:
        initial["eigenstate"] = args.eigenstate
    if args.gaussian_center is not None or args.gaussian_width is not None:
        gaussian = {}
        if args.gaussian_center is not None:
            gaussian["center"] = args.gaussian_center
        if args.gaussian_width is not None:
            gaussian["width"] = args.gaussian_width
        if args.gaussian_momentum is not None:
            gaussian["momentum"] = args.gaussian_momentum
        initial["gaussian"] = gaussian
    data["initial"] = initial
    if args.observe:
        data["observables"] = dict(args.observe)
    if args.norm_tol is not None:
        data["tolerances"] = {"norm": args.norm_tol}
    output = {}
    if args.out:
        output["evolution"] = args.out
    if args.snapshot:
        output["snapshot"] = args.snapshot
    if output:
        data["output"] = output
    return _run_dict(data)


def main(argv=None) -> int:
    _cap_threads()
    parser = _build_parser()
    args = parser.parse_args(argv)
    from .errors import ExpressionError, ScenarioError

    try:
        return args.func(args)
    except (ScenarioError, ExpressionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
