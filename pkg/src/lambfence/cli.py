"""``lambfence scan|parse <spec> <input>`` command-line entry point.

Exit codes: 0 ok, 1 spec error, 2 scan error, 3 no valid tree.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace

from . import export
from .chart import NoParse
from .enforce import AllTreesRejected, EvaluatorFailure
from .pipeline import parse_with_spec
from .scanner import Policy, UnscannableRegion, build_lexical_graph
from .specfile import SpecError, load_language_spec

EXIT_OK, EXIT_SPEC, EXIT_SCAN, EXIT_NOPARSE = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lambfence", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("scan", "print the lexical analysis graph"), ("parse", "print the parse forest")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("spec", help="language spec file")
        p.add_argument("input", help="input text file ('-' for stdin)")
        p.add_argument("--format", choices=("json", "dot"), default="json")
        p.add_argument("--policy", choices=[x.value for x in Policy], default=None)
        p.add_argument("--report", action="store_true", help="also print the run report (stderr for dot)")
        if name == "parse":
            p.add_argument("--count-trees", action="store_true", help="print only the number of trees")
    return ap


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = load_language_spec(args.spec)
    except SpecError as exc:
        for d in exc.diagnostics:
            print(f"{args.spec}:{d}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"lambfence: {exc}", file=sys.stderr)
        return EXIT_SPEC
    try:
        text = _read_input(args.input)
    except OSError as exc:
        print(f"lambfence: {exc}", file=sys.stderr)
        return EXIT_SCAN
    if args.command == "scan":
        return _scan(spec, text, args)
    return _parse(spec, text, args)


def _scan(spec, text: str, args) -> int:
    config = spec.scan_config
    if args.policy:
        config = replace(config, policy=Policy(args.policy))
    t0 = time.perf_counter()
    try:
        la = build_lexical_graph(text, spec.token_specs, config)
    except UnscannableRegion as exc:
        print(f"lambfence: {exc}", file=sys.stderr)
        return EXIT_SCAN
    elapsed = time.perf_counter() - t0
    if args.format == "dot":
        sys.stdout.write(export.export_dot(la))
        if args.report:
            print(f"tokens={len(la.tokens)} paths={la.count_paths()}", file=sys.stderr)
    else:
        data = export.la_to_json(la)
        if args.report:
            data["summary"]["elapsed"] = {"scan": round(elapsed, 6)}
        sys.stdout.write(export.dumps(data))
    return EXIT_OK


def _parse(spec, text: str, args) -> int:
    try:
        result = parse_with_spec(spec, text, args.policy)
    except UnscannableRegion as exc:
        print(f"lambfence: {exc}", file=sys.stderr)
        return EXIT_SCAN
    except NoParse as exc:
        if args.count_trees:
            print(0)
        print(f"lambfence: {exc}", file=sys.stderr)
        return EXIT_NOPARSE
    except AllTreesRejected as exc:
        if args.count_trees:
            print(0)
        print(f"lambfence: {exc}", file=sys.stderr)
        return EXIT_NOPARSE
    except EvaluatorFailure as exc:
        print(f"lambfence: {exc}", file=sys.stderr)
        return EXIT_NOPARSE
    report = result.report
    if args.count_trees:
        print(report.tree_count)
    elif args.format == "dot":
        sys.stdout.write(export.export_dot(result.egraph))
        if args.report:
            print(export.dumps(report.as_dict()), file=sys.stderr, end="")
    else:
        data = export.egraph_to_json(result.egraph)
        data["report"] = report.as_dict()
        if not args.report:
            data["report"].pop("elapsed")
        sys.stdout.write(export.dumps(data))
    return EXIT_OK if report.tree_count >= 1 else EXIT_NOPARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
