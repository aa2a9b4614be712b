"""Command-line front end.

Exit codes: 0 when every consistency check passes, 1 when a check fails,
2 for invalid input (bad flags, infeasible instances, unwritable paths).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from .composer import compose, share_plan
from .errors import DomainError, PlanningError, SizingError
from .planner import plan
from .rate_laws import ProblemInstance, rc_star, t_star
from .rational import Q, dec, fmt
from .simulator import make_library, run_all, verify_against_formula
from .sweeps import MODES, SweepSpec, run_sweep

EXIT_OK, EXIT_CHECK_FAILED, EXIT_BAD_INPUT = 0, 1, 2


def _rational(text: str) -> Fraction:
    try:
        return Q(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _flag(parser, name: str, **kwargs):
    """Register ``-name`` with a ``--name`` alias."""
    parser.add_argument(f"-{name}", f"--{name}", dest=name, **kwargs)


def _add_caches(p, required=True):
    _flag(p, "N", type=int, required=True, help="number of files")
    _flag(p, "M1", type=_rational, required=required, help="cache size of user 1, in files")
    _flag(p, "M2", type=_rational, required=required, help="cache size of user 2, in files")


def _add_links(p):
    _flag(p, "Rc", type=_rational, default=Fraction(1), help="shared link capacity (default 1)")
    _flag(p, "Rp1", type=_rational, default=Fraction(0), help="private link capacity of user 1 (default 0)")
    _flag(p, "Rp2", type=_rational, default=Fraction(0), help="private link capacity of user 2 (default 0)")


def _add_output(p, help_text):
    _flag(p, "o", metavar="PATH", default=None, help=help_text)
    p.add_argument("--json", action="store_true", help="print JSON instead of the bare rational")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetcache", description="Two-user cache-aided delivery toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="optimal shared-link rate rc_star")
    _add_caches(p)
    _add_output(p, "also write the JSON result here")

    p = sub.add_parser("latency", help="optimal worst-case latency t_star")
    _add_caches(p)
    _add_links(p)
    _add_output(p, "also write the JSON result here")

    p = sub.add_parser("plan", help="latency-optimal operating point")
    _add_caches(p)
    _add_links(p)
    _flag(p, "o", metavar="PATH", default=None, help="also write the plan JSON here")

    p = sub.add_parser("simulate", help="plan, compose and simulate a code on all demands")
    _add_caches(p)
    _add_links(p)
    _flag(p, "seed", type=int, default=0, help="library seed (default 0)")
    _flag(p, "F", type=int, default=None, help="file size in bits (default: smallest valid)")
    _flag(p, "o", metavar="STEM", default="report", help="write STEM.csv, STEM.json and STEM.code.json")

    for name, modes in (("sweep", MODES), ("compare-lhc", None), ("compare-bounds", None)):
        p = sub.add_parser(name, help=f"grid sweep ({name})" if modes is None else "grid sweep")
        if modes is not None:
            p.add_argument("--mode", choices=modes, default="rate")
        _flag(p, "N", type=int, nargs="+", required=True, help="one or more file counts")
        _flag(p, "M1", type=_rational, default=None, help="pin M1 instead of sweeping it")
        _flag(p, "M2", type=_rational, default=None, help="pin M2 instead of sweeping it")
        _flag(p, "step", type=_rational, default=None, help="grid step (default N/20)")
        _add_links(p)
        _flag(p, "o", metavar="PATH", default=None, help="CSV output path (default stdout)")
    return parser


def _instance(args) -> ProblemInstance:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        inst = ProblemInstance.create(args.N, args.M1, args.M2, args.Rc, args.Rp1, args.Rp2)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return inst


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _emit_value(args, payload: dict, key: str) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if args.json:
        sys.stdout.write(text)
    else:
        print(payload[key])
    if args.o:
        _write(args.o, text)


def cmd_rate(args) -> int:
    r = rc_star(args.N, args.M1, args.M2)
    payload = {"N": args.N, "M1": fmt(args.M1), "M2": fmt(args.M2), "rc_star": fmt(r), "rc_star_decimal": dec(r)}
    _emit_value(args, payload, "rc_star")
    return EXIT_OK


def cmd_latency(args) -> int:
    inst = _instance(args)
    T = t_star(inst)
    payload = {
        "N": inst.N, "M1": fmt(inst.M1), "M2": fmt(inst.M2),
        "Rc": fmt(inst.Rc), "Rp1": fmt(inst.Rp1), "Rp2": fmt(inst.Rp2),
        "t_star": fmt(T), "t_star_decimal": dec(T),
    }
    _emit_value(args, payload, "t_star")
    return EXIT_OK


def cmd_plan(args) -> int:
    p = plan(_instance(args))
    text = p.to_json()
    print(text, end="")
    if args.o:
        _write(args.o, text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst = _instance(args)
    p = plan(inst)
    code = compose(share_plan(inst.N, inst.M1, inst.M2, p.rp1, p.rp2), args.F)
    report = run_all(code, make_library(inst.N, code.F, args.seed), inst.Rc, inst.Rp1, inst.Rp2)
    ok = verify_against_formula(report, inst) and report.worst_case_T == p.T
    _write(f"{args.o}.csv", report.to_csv())
    _write(f"{args.o}.json", report.to_json())
    _write(f"{args.o}.code.json", code.to_json())
    decoded = sum(all(r.decode_ok) for r in report.rows)
    print(f"F={code.F} demands={len(report.rows)} decoded={decoded} "
          f"T={fmt(report.worst_case_T)} t_star={fmt(t_star(inst))} formula_match={report.formula_match}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_sweep(args) -> int:
    mode = getattr(args, "mode", None) or args.command
    spec = SweepSpec(mode, args.N, args.step, args.M1, args.M2, [(args.Rc, args.Rp1, args.Rp2)])
    result = run_sweep(spec)
    text = result.to_csv()
    if args.o:
        _write(args.o, text)
    else:
        sys.stdout.write(text)
    for failure in result.failures:
        print(f"check failed: {failure}", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_CHECK_FAILED


COMMANDS = {
    "rate": cmd_rate,
    "latency": cmd_latency,
    "plan": cmd_plan,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "compare-lhc": cmd_sweep,
    "compare-bounds": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (DomainError, SizingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except PlanningError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
