"""Command-line entry point: ``biotrace validate|classify|generate|mutate|explain``.

Exit codes: 0 clean, 1 violations with severity error, 2 unreadable trace
(parse failure), 3 usage error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import codes
from .checks import validate_trace
from .generator import MUTATIONS, GenConfig, generate_trace, mutate_trace, parse_target
from .model import UsageError
from .modes import classify_mode
from .ontology import check_conformance
from .traceio import ParseError, read_trace, serialize_trace, write_trace

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_PARSE = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _machine_line(v) -> str:
    return f"{v.code}\t{v.subject.kind}:{v.subject.name}\t{v.message}"


def _cmd_validate(args) -> int:
    trace = read_trace(args.file)
    report = validate_trace(trace)
    violations = list(report.violations)
    if args.ontology:
        violations.extend(check_conformance(trace).violations)
    if args.format == "machine":
        for v in violations:
            print(_machine_line(v))
    else:
        for v in violations:
            where = f"record {v.position + 1}" if v.position is not None else "-"
            print(f"{v.severity:<7} {v.code:<26} {v.subject}  ({where}) {v.message}")
        errors = sum(v.severity == codes.ERROR for v in violations)
        counts = ", ".join(f"c({k})={n}" for k, n in report.checked_counts.items())
        print(f"{errors} error(s), {len(violations) - errors} warning(s); {counts}")
    return EXIT_VIOLATIONS if any(v.severity == codes.ERROR for v in violations) else EXIT_OK


def _cmd_classify(args) -> int:
    trace = read_trace(args.file)
    interval = None
    if args.k_min is not None or args.k_max is not None:
        if args.k_min is None or args.k_max is None:
            raise UsageError("--k-min and --k-max must be given together")
        interval = (args.k_min, args.k_max)
    report = classify_mode(trace, args.batch, interval)
    print(report.to_json() if args.format == "machine" else report.to_text())
    return EXIT_OK


def _cmd_generate(args) -> int:
    k_range = None
    if args.k_min is not None or args.k_max is not None:
        k_range = (args.k_min or args.k, args.k_max or args.k)
    cfg = GenConfig(
        seed=args.seed,
        target=parse_target(args.target),
        phenomena=args.phenomena,
        classes=args.classes,
        samples_per_phenomenon=args.samples_per_phenomenon,
        k=args.k,
        k_range=k_range,
        m=args.m,
        extras=args.extras,
        mu=args.mu,
        mu_placement=args.placement,
        persons=not args.broader,
    )
    _emit(generate_trace(cfg), args.output)
    return EXIT_OK


def _cmd_mutate(args) -> int:
    _emit(mutate_trace(read_trace(args.file), args.mutation, args.seed), args.output)
    return EXIT_OK


def _cmd_explain(args) -> int:
    try:
        print(codes.explain(args.code))
    except KeyError:
        raise UsageError(f"unknown violation code {args.code!r}; known codes: {', '.join(codes.CATALOG)}")
    return EXIT_OK


def _emit(trace, output: str) -> None:
    if output == "-":
        sys.stdout.write(serialize_trace(trace))
    else:
        write_trace(trace, output)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="biotrace", description="Validate and classify biometric recognition traces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a trace against the mapping properties")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--ontology", action="store_true", help="also run class-model conformance checks")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("classify", help="infer system kind and phase of one recognition batch")
    p.add_argument("file")
    p.add_argument("--batch", required=True)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("generate", help="write a synthetic trace")
    p.add_argument("--target", required=True, help="<kind>:<phase> or random-valid")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--phenomena", type=int, default=6)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--samples-per-phenomenon", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--extras", type=int, default=2)
    p.add_argument("--mu", type=int, default=1)
    p.add_argument("--placement", choices=("sampling", "extraction"), default="sampling")
    p.add_argument("--broader", action="store_true", help="phenomena are not persons")
    p.add_argument("-o", "--output", required=True, help="output path, or - for stdout")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("mutate", help="inject one named defect into a trace")
    p.add_argument("file")
    p.add_argument("--mutation", required=True, choices=sorted(MUTATIONS))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True, help="output path, or - for stdout")
    p.set_defaults(func=_cmd_mutate)

    p = sub.add_parser("explain", help="describe the rule behind a violation code")
    p.add_argument("code")
    p.set_defaults(func=_cmd_explain)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"biotrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"biotrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
