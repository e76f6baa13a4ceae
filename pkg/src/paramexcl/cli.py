"""Command-line driver: derive, check, certify, tune, orbit-verify, report.

Exit codes: 0 success, 1 refuted, 2 invalid input, 3 undecided or precision
exhausted.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .arith import Precision, RInterval
from .certificate import (
    certify,
    check_document,
    dumps,
    render_text,
    serialize_geometry,
    serialize_orbit,
    serialize_start,
)
from .chain import FormulaMode, Verdict
from .config import FRACTION_FIELDS, Inputs, read_ini, run_check_escalating
from .errors import (
    AmbiguousFloor,
    ArithOverflow,
    ArithUnderflow,
    ChainSingularity,
    DomainError,
    EmptySpace,
    InvalidEta,
    InvalidInput,
    NonResonanceFailure,
    NotFound,
    ParamExclError,
    PrecisionExhausted,
    Undecided,
)
from .orbit import default_precision, verify_orbit_escalating
from .quadratic import quadratic_setup
from .tuner import SearchSpace, summary_line, tune

EXIT_OK, EXIT_REFUTED, EXIT_INVALID, EXIT_UNDECIDED = 0, 1, 2, 3
INPUT_KEYS = ("delta_exp", "iota", "eps_exp") + tuple(k for k in FRACTION_FIELDS if k != "iota")
VERDICT_EXIT = {Verdict.PROVED: EXIT_OK, Verdict.REFUTED: EXIT_REFUTED, Verdict.UNDECIDED: EXIT_UNDECIDED}


def _add_inputs(p, lists=False):
    kind = "comma-separated list" if lists else "value"
    p.add_argument("--config", help="INI-style file of key = value lines; flags override it")
    p.add_argument("--delta-exp", help=f"delta = 10^-k ({kind})")
    p.add_argument("--iota", help=f"exponent of the outer neighbourhood ({kind})")
    p.add_argument("--eps-exp", help=f"window [2 - 10^-k, 2] ({kind})")
    p.add_argument("--s-alpha1", help=f"alpha1 mix fraction ({kind})")
    p.add_argument("--s-gamma1", help=f"gamma1 fraction of gamma1max ({kind})")
    p.add_argument("--s-gamma2", help=f"gamma2 fraction ({kind})")
    p.add_argument("--s-lambda0", help=f"lambda0 mix fraction ({kind})")
    p.add_argument("--mode", choices=[m.value for m in FormulaMode], default=None)
    p.add_argument("--bits", type=int, default=None, help="chain precision (default 256)")
    p.add_argument("--format", choices=("json", "text"), default="json")


def _add_orbit(p):
    p.add_argument("--orbit-bits", type=int, default=None, help="orbit precision (default from eps)")
    p.add_argument("--retries", type=int, default=3, help="precision doublings on exhaustion")
    p.add_argument("--trace", help="write the box orbit trace (n, lo, hi) to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paramexcl", description="Certified parameter exclusion for x^2 - a.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="starting constants and geometry bounds")
    _add_inputs(p)
    p = sub.add_parser("check", help="chain and conditions C1-C4")
    _add_inputs(p)
    p = sub.add_parser("certify", help="full pipeline including the orbit checks")
    _add_inputs(p)
    _add_orbit(p)
    p = sub.add_parser("orbit-verify", help="orbit checks A2-A4 and N1 only")
    _add_inputs(p)
    _add_orbit(p)
    p = sub.add_parser("tune", help="grid search and coordinate descent over inputs")
    _add_inputs(p, lists=True)
    p.add_argument("--budget", type=int, default=None, help="evaluations (default: grid size)")
    p.add_argument("--orbit", choices=("off", "winner", "all"), default="winner",
                   help="orbit checks: none, once on the winner (fast), or per candidate")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--frontier-cap", type=int, default=100)
    p.add_argument("--orbit-bits", type=int, default=None)
    p = sub.add_parser("report", help="render a certificate JSON file as text")
    p.add_argument("path")
    return parser


def _settings(args) -> dict:
    raw = read_ini(args.config) if getattr(args, "config", None) else {}
    for key in INPUT_KEYS + ("mode", "bits"):
        v = getattr(args, key, None)
        if v is not None:
            raw[key] = str(v)
    return raw


def _inputs(raw) -> Inputs:
    data = {k: raw[k] for k in INPUT_KEYS if k in raw}
    try:
        return Inputs.from_dict(data)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(str(exc)) from exc


def _mode(raw) -> FormulaMode:
    try:
        return FormulaMode(raw.get("mode", "compat"))
    except ValueError as exc:
        raise InvalidInput(f"unknown mode {raw.get('mode')!r}") from exc


def _bits(value, default=None) -> Precision | None:
    if value is None:
        return default
    return Precision(int(value))


def _emit(doc: dict, fmt: str):
    sys.stdout.write(dumps(doc) if fmt == "json" else render_text(doc))


def cmd_derive(args) -> int:
    raw = _settings(args)
    inputs, prec = _inputs(raw), _bits(raw.get("bits"), Precision(256))
    pt = lambda v: RInterval.point(v, prec)  # noqa: E731
    setup = quadratic_setup(pt(inputs.delta), pt(inputs.iota), inputs.window, prec, _mode(raw), inputs.s_lambda0)
    doc = {
        "family": "quadratic",
        "mode": _mode(raw).value,
        "precision_bits": prec.bits,
        "inputs": inputs.to_dict(),
        "starting_constants": serialize_start(setup.start),
        "geometry": serialize_geometry(setup.geom),
        "pending": list(setup.pending),
    }
    _emit(doc, args.format)
    return EXIT_OK


def cmd_check(args) -> int:
    raw = _settings(args)
    res = run_check_escalating(_inputs(raw), _mode(raw), _bits(raw.get("bits"), Precision(256)))
    doc = check_document(res)
    _emit(doc, args.format)
    first = res.report.first_failure()
    if first is not None:
        print(f"first failing condition: {first.name} ({first.holds.value})", file=sys.stderr)
    return VERDICT_EXIT[res.report.verdict]


def cmd_certify(args) -> int:
    raw = _settings(args)
    inputs = _inputs(raw)
    trace = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        cert = certify(inputs, _mode(raw), _bits(raw.get("bits")), _bits(args.orbit_bits), args.retries, trace)
    finally:
        if trace:
            trace.close()
    _emit(cert.document, args.format)
    return {"certified": EXIT_OK, "failed": EXIT_REFUTED, "undecided": EXIT_UNDECIDED}[cert.verdict]


def cmd_orbit(args) -> int:
    raw = _settings(args)
    inputs = _inputs(raw)
    res = run_check_escalating(inputs, _mode(raw), _bits(raw.get("bits"), Precision(256)))
    prec = _bits(args.orbit_bits) or default_precision(inputs.eps_exp, inputs.delta_exp)
    trace = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        v = verify_orbit_escalating(res.setup, prec, args.retries, dump=trace)
    finally:
        if trace:
            trace.close()
    doc = {"family": "quadratic", "inputs": inputs.to_dict(), "orbit": serialize_orbit(v)}
    _emit(doc, args.format)
    return VERDICT_EXIT[v.verdict]


def _grid(raw, key, conv):
    if key not in raw:
        return None
    try:
        return tuple(conv(v.strip()) for v in str(raw[key]).split(",") if v.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"bad value list for {key}: {raw[key]!r}") from exc


def cmd_tune(args) -> int:
    raw = _settings(args)
    grids = {}
    for key in INPUT_KEYS:
        vals = _grid(raw, key, int if key.endswith("_exp") else Fraction)
        if vals is not None:
            grids[key] = vals
    space = SearchSpace.around(**grids)
    budget = args.budget if args.budget is not None else space.size
    result = tune(space, budget, _mode(raw), _bits(raw.get("bits"), Precision(256)), orbit=args.orbit,
                  workers=args.workers, orbit_prec=_bits(args.orbit_bits))
    doc = {"space": space.to_dict(), "budget": str(budget), **result.to_dict(args.frontier_cap)}
    if args.format == "json":
        sys.stdout.write(dumps(doc))
    else:
        print(f"evaluated {result.evaluated} of budget {budget}")
        print("best: " + (summary_line(result.best) if result.best else "none"))
        for name, count in sorted(result.failures.items()):
            print(f"failed at {name}: {count}")
        if result.winner_orbit is not None:
            print(f"winner orbit verdict: {result.winner_orbit.verdict.value}")
    if result.best is None:
        return EXIT_REFUTED
    if result.winner_orbit is not None:
        return VERDICT_EXIT[result.winner_orbit.verdict]
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        with open(args.path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read certificate: {exc}") from exc
    sys.stdout.write(render_text(doc))
    return EXIT_OK


COMMANDS = {
    "derive": cmd_derive,
    "check": cmd_check,
    "certify": cmd_certify,
    "orbit-verify": cmd_orbit,
    "tune": cmd_tune,
    "report": cmd_report,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InvalidInput, EmptySpace, InvalidEta) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ChainSingularity, DomainError, NonResonanceFailure, NotFound) as exc:
        print(f"refuted: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_REFUTED
    except (PrecisionExhausted, Undecided, AmbiguousFloor, ArithOverflow, ArithUnderflow) as exc:
        print(f"undecided: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except ParamExclError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
