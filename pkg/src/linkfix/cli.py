"""Command line: ``linkfix analyze | verify | render``.

Exit codes: 0 pass, 2 bad input or uncertified map, 3 degenerate orbit
polygon, 4 a guaranteed property failed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .arrangement import build_arrangement, build_gamma, face_windings
from .dynmap import lip_bound
from .errors import DegeneracyError, LinkfixError
from .pipeline import (Analysis, EXIT_DEGENERATE, EXIT_FALSIFIED, EXIT_INPUT, EXIT_OK, analyze,
                       format_corpus_report, format_report, run_pipeline, verify, verify_corpus)
from .problem import InputError, read_problem
from .render import render_svg


def _dump(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True)


def _seed(arg):
    env = os.environ.get("LINKFIX_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"LINKFIX_SEED must be an integer, got {env!r}") from None
    return 0 if arg is None else arg


def cmd_analyze(args) -> int:
    problem = read_problem(args.file)
    report, code = analyze(problem, args.tol, args.allow_uncertified)
    if args.json:
        print(_dump(report))
    else:
        print(format_report(report))
        print(_dump(report))
    return code


def cmd_verify(args) -> int:
    seed = _seed(args.seed)
    if args.file is None:
        report, code = verify_corpus(seed, args.trials)
        text = format_corpus_report(report)
    else:
        report, code = verify(read_problem(args.file), seed, args.trials, args.allow_uncertified)
        text = format_report(report)
    if args.json:
        print(_dump(report))
    else:
        print(text)
        print(_dump(report))
    return code


def cmd_render(args) -> int:
    problem = read_problem(args.file)
    try:
        arr = face_windings(build_arrangement(build_gamma(problem.orbit)))
    except DegeneracyError as exc:
        print(f"error: no arrangement: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    cert = lip_bound(problem.map)
    if cert.certified or args.allow_uncertified:
        try:
            analysis = run_pipeline(problem, enforce=not args.allow_uncertified)
        except LinkfixError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_FALSIFIED
    else:
        # faces and windings only; indices and the fixed point need the certificate
        print(f"note: k = {cert.k:.6g} > 1, drawing faces without indices or fixed point",
              file=sys.stderr)
        analysis = Analysis(problem, cert, arrangement=arr)
    try:
        Path(args.output).write_text(render_svg(analysis), encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"wrote {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linkfix",
                                description="Fixed points linked to a periodic orbit of a plane map.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the full pipeline on one input")
    a.add_argument("file")
    a.add_argument("--tol", type=float, default=None, help="fixed-point box size (default from input or 1e-8)")
    a.add_argument("--allow-uncertified", action="store_true",
                   help="accept k > 1 and report failures without asserting")
    a.add_argument("--json", action="store_true", help="print only the JSON report")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="randomized property suites; built-in corpus when no file is given")
    v.add_argument("file", nargs="?")
    v.add_argument("--seed", type=int, default=None, help="random seed (LINKFIX_SEED overrides)")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--allow-uncertified", action="store_true")
    v.add_argument("--json", action="store_true", help="print only the JSON report")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="write an SVG diagram of the faces and the fixed point")
    r.add_argument("file")
    r.add_argument("-o", "--output", required=True)
    r.add_argument("--allow-uncertified", action="store_true")
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
