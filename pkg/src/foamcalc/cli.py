"""Command-line interface: ``foamcalc homology|quantum|eval-foam|selftest|fixtures``.

Exit codes: 0 success, 1 input error, 2 invariant or self-test failure.
Output is deterministic for a given input (timings only appear with
``--timing``).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import List, Optional

from .algebra import _fraction_str
from .complex import METHODS, ComplexError, build_complex, check_d_squared, homology_poincare
from .fixtures import FIXTURE_NAMES, braid_text, fixture
from .foam import MovieError, UnsupportedFoam, evaluate_closed, movie_from_json
from .selftest import CONTROLS, run_selftest
from .spider import quantum_invariant
from .web import InvariantFailure, LinkDiagram, ParseError, WebError, parse_braid_text, parse_pd

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2


class InputError(Exception):
    pass


class CheckFailure(Exception):
    pass


def _add_link_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--name", help=f"named fixture ({', '.join(FIXTURE_NAMES)})")
    g.add_argument("--braid", help='braid closure, e.g. "2;1,1,1"')
    g.add_argument("--pd", help="signed PD code, e.g. \"Xp[1,2,2,1]\"")
    g.add_argument("--pd-file", help="file holding a signed PD code")
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p.add_argument("--timing", action="store_true", help="report wall-clock seconds")


def _diagram(args) -> LinkDiagram:
    if args.name is not None:
        return fixture(args.name)
    if args.braid is not None:
        return parse_braid_text(args.braid)
    if args.pd is not None:
        return parse_pd(args.pd)
    try:
        with open(args.pd_file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.pd_file}: {exc.strerror}") from None
    return parse_pd(text)


def _echo(args) -> dict:
    for key in ("name", "braid", "pd", "pd_file"):
        v = getattr(args, key, None)
        if v is not None:
            return {key: v}
    return {}


def _emit(args, report: dict, text_lines: List[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            print(line)


def cmd_homology(args) -> int:
    d = _diagram(args)
    t0 = time.perf_counter()
    C = build_complex(d, method=args.method)
    checks = {}
    if args.check_d2:
        checks["d2"] = check_d_squared(C)
        if not checks["d2"]:
            raise CheckFailure("d^2 != 0 on the assembled cube")
    P = homology_poincare(C)
    report = {"input": _echo(args), "poincare": P.to_json(), "checks": checks}
    lines = [str(P)]
    if args.check_euler:
        Qv = quantum_invariant(d)
        ok = P.eval_t(-1) == Qv
        checks["euler"] = ok
        report["quantum"] = Qv.to_json()
        lines.append(f"euler check: {'ok' if ok else 'FAILED'} ({Qv})")
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
        lines.append(f"time: {report['seconds']} s")
    _emit(args, report, lines)
    if args.check_euler and not checks["euler"]:
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_quantum(args) -> int:
    d = _diagram(args)
    t0 = time.perf_counter()
    Qv = quantum_invariant(d)
    report = {"input": _echo(args), "quantum": Qv.to_json(), "checks": {}}
    lines = [str(Qv)]
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
        lines.append(f"time: {report['seconds']} s")
    _emit(args, report, lines)
    return EXIT_OK


def cmd_eval_foam(args) -> int:
    try:
        if args.movie == "-":
            text = sys.stdin.read()
        else:
            with open(args.movie, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.movie}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError("a movie is a JSON object with 'source' and 'events'")
    m = movie_from_json(data)
    if not m.is_closed():
        raise InputError("only closed movies (empty source and target) can be evaluated")
    v = evaluate_closed(m)
    report = {"input": {"movie": args.movie}, "value": _fraction_str(Fraction(v)), "checks": {}}
    _emit(args, report, [_fraction_str(Fraction(v))])
    return EXIT_OK


def cmd_selftest(args) -> int:
    checks = run_selftest(quick=args.quick, control=args.control)
    failed = [c for c in checks if not c.ok]
    report = {
        "control": args.control,
        "checks": {c.name: c.ok for c in checks},
        "failures": {c.name: c.detail for c in failed},
    }
    lines = [c.line() for c in checks]
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    _emit(args, report, lines)
    return EXIT_INVARIANT if failed else EXIT_OK


def cmd_fixtures(args) -> int:
    for name in FIXTURE_NAMES:
        print(f"{name}\t{braid_text(name)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="foamcalc", description="sl(3) foam link homology calculator")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("homology", help="Poincare polynomial of the link homology")
    _add_link_args(h)
    h.add_argument("--check-euler", action="store_true", help="compare with the quantum invariant at t=-1")
    h.add_argument("--check-d2", dest="check_d2", action="store_true", default=True, help="assert d^2 = 0 (default)")
    h.add_argument("--no-check-d2", dest="check_d2", action="store_false")
    h.add_argument("--method", choices=METHODS, default="glued", help="how differential entries are evaluated")
    h.set_defaults(func=cmd_homology)

    qp = sub.add_parser("quantum", help="quantum sl(3) invariant by the skein expansion")
    _add_link_args(qp)
    qp.set_defaults(func=cmd_quantum)

    e = sub.add_parser("eval-foam", help="evaluate a closed movie given as JSON (file or -)")
    e.add_argument("movie")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_eval_foam)

    s = sub.add_parser("selftest", help="run the identity and property suites")
    s.add_argument("--quick", action="store_true", help="small fixtures only")
    s.add_argument("--break", dest="control", choices=CONTROLS, default=None,
                   help="negative control: run with a deliberately wrong convention")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_selftest)

    f = sub.add_parser("fixtures", help="list the named fixtures")
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, MovieError, WebError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ComplexError, InvariantFailure, UnsupportedFoam, CheckFailure) as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
