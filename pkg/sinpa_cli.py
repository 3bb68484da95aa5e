"""Decide or re-print existential sine-Presburger sentences from the command line."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from typing import Sequence

import config
from errors import SinPAError
from frontend import format_sentence, parse
from models import DecisionReport
from pipeline import DecideOptions, Decision, decide_existential
from proxy_search import SCHEDULES, Status

EXIT_CODES = {Status.SAT: 0, Status.UNSAT: 1, Status.UNKNOWN: 2}
EXIT_INPUT_ERROR = 64


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="sinpa-solve", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    decide = commands.add_parser("decide", help="Decide satisfiability of a sentence.")
    decide.add_argument("source", help="Path to the sentence file, or - for stdin.")
    decide.add_argument(
        "--budget",
        type=int,
        default=config.BOX_BUDGET,
        help=f"Box budget for the branch-and-prune search (default: {config.BOX_BUDGET}).",
    )
    decide.add_argument(
        "--precision",
        type=int,
        default=None,
        help="Working precision in bits; the ladder doubles it twice. Defaults to SINPA_PRECISION_LADDER.",
    )
    decide.add_argument(
        "--witness-bound",
        dest="witness_bound",
        type=int,
        default=config.WITNESS_BOUND,
        help=f"Integer witness search bound (default: {config.WITNESS_BOUND}).",
    )
    decide.add_argument(
        "--schedule",
        choices=SCHEDULES,
        default=config.SCHEDULE,
        help=f"Box exploration order (default: {config.SCHEDULE}).",
    )
    decide.add_argument("--trace", action="store_true", help="Report formula size after every stage.")
    decide.add_argument("--json", action="store_true", help="Emit the verdict, certified box and stage statistics as JSON.")

    printer = commands.add_parser("print", help="Parse a sentence and print its canonical form.")
    printer.add_argument("source", help="Path to the sentence file, or - for stdin.")
    return parser.parse_args(argv)


def _read_source(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, encoding="utf-8") as handle:
        return handle.read()


def _options(args: argparse.Namespace) -> DecideOptions:
    options = DecideOptions(
        budget=args.budget,
        witness_bound=args.witness_bound,
        schedule=args.schedule,
        trace_formulas=args.trace,
    )
    if args.precision is not None:
        options = dataclasses.replace(options, precision_ladder=DecideOptions.ladder_from(args.precision))
    return options


def _report(decision: Decision, args: argparse.Namespace) -> None:
    result = decision.to_model()
    if args.json:
        report = DecisionReport(
            verdict=result.verdict,
            witness=result.witness,
            certified_box=result.certified_box,
            period_N=decision.period,
            schanuel_conditional=result.schanuel_conditional,
            stage_stats=decision.trace.stages,
            message=result.message,
            trace=decision.trace if args.trace else None,
        )
        print(json.dumps(report.model_dump(), indent=2))
        return

    print(result.verdict)
    if result.witness:
        print("Witness: " + ", ".join(f"{name} = {value}" for name, value in result.witness.items()))
    elif result.verdict == Status.SAT.value:
        print("Witness: none found within the bound")
    if result.certified_box:
        print("Certified box (reduced coordinates):")
        for name, interval in zip(decision.names, result.certified_box):
            print(f"  {name} in [{interval.lo}, {interval.hi}]")
    if result.message:
        print(f"Note: {result.message}")
    if result.schanuel_conditional:
        print("Note: verdict assumes Schanuel's conjecture")

    if args.trace:
        print("--- Trace ---")
        for stage in decision.trace.stages:
            print(f"{stage.name}: {stage.clauses} clauses, {stage.literals} literals, {stage.seconds:.3f}s")
        print(f"Period multiplier: {decision.trace.period_multiplier}")
        print(f"Boxes explored: {decision.trace.boxes_explored}")


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=config.LOG_LEVEL, stream=sys.stderr)

    try:
        text = _read_source(args.source)
    except OSError as exc:
        print(f"Cannot read {args.source}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        sentence = parse(text)
        if args.command == "print":
            print(format_sentence(sentence))
            return 0
        decision = decide_existential(sentence, _options(args))
    except SinPAError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR

    _report(decision, args)
    return EXIT_CODES[decision.status]


if __name__ == "__main__":
    raise SystemExit(main())
