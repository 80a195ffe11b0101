"""Command-line front end.

Subcommands:

* cfa-dump     print the control-flow automaton of a program
* verify       run the assertion analysis, optionally saving the
               assumption automaton of the explored region
* cover-exact  exact statement coverage of a program under an automaton
* cover-under  coverage under-approximation from generated executions
* score        exploration-priority scores derived from an automaton

Exit codes: 0 success, 1 confirmed assertion violation, 2 usage, parse
or format errors (also an interrupted verify whose condition was not
saved anywhere), 3 unexpected internal errors.

Time limits are soft: they are checked between node expansions, so a
single long expansion can overshoot before the run stops.  Deterministic
runs should use --max-nodes instead.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence

from . import automaton, coverage, heuristic
from .automaton import AssumptionAutomaton, FormatError, StatementIdMismatch
from .cfa import Cfa, dump_cfa, statement_ids
from .explorer import (Budget, COUNTEREXAMPLES, Execution, MissingScores,
                       UNKNOWN, Spec, explore, make_strategy)
from .lang import ParseError, UndeclaredVariable
from .lowering import source_to_cfa

EXIT_OK = 0
EXIT_BUG = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

STRATEGIES = ("bfs", "dfs-postorder", "dfs-postorder+score")


@dataclass
class RunConfig:
    """Everything one invocation needs; defaults match the documentation."""

    command: str
    program: str
    time_limit: float = 900.0  # seconds; zero or negative means unlimited
    max_nodes: int = 0  # zero means unlimited
    max_cex: int = 10
    strategy: str = "dfs-postorder"
    nondet_min: int = -8
    nondet_max: int = 8
    aa_in: Optional[str] = None
    aa_out: Optional[str] = None
    format: str = "text"


class _CliError(Exception):
    """A user-facing error that maps to EXIT_USAGE."""


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc.strerror or exc}")


def _load_cfa(config: RunConfig) -> Cfa:
    source = _read_text(config.program)
    return source_to_cfa(source, name=Path(config.program).stem)


def _load_aa(config: RunConfig, cfa: Cfa) -> AssumptionAutomaton:
    if config.aa_in is None:
        raise _CliError(f"{config.command} requires --aa")
    aa = automaton.parse_aa(_read_text(config.aa_in))
    automaton.check_alphabet(aa, statement_ids(cfa))
    return aa


def _budget(config: RunConfig) -> Budget:
    time_limit = config.time_limit if config.time_limit > 0 else None
    max_nodes = config.max_nodes if config.max_nodes > 0 else None
    if config.max_cex <= 0:
        raise _CliError("--max-cex must be positive")
    return Budget(time_limit=time_limit, max_nodes=max_nodes,
                  max_counterexamples=config.max_cex)


def _domain(config: RunConfig) -> range:
    if config.nondet_min > config.nondet_max:
        raise _CliError("--nondet-min must not exceed --nondet-max")
    return range(config.nondet_min, config.nondet_max + 1)


def _strategy(config: RunConfig, cfa: Cfa,
              aa: Optional[AssumptionAutomaton]):
    if config.strategy == "dfs-postorder+score":
        if aa is None:
            raise _CliError("--strategy dfs-postorder+score needs --aa")
        return make_strategy(config.strategy, heuristic.score(aa, cfa))
    return make_strategy(config.strategy)


def _witness_text(witness: Dict[int, int]) -> str:
    return " ".join(f"n{i}={witness[i]}" for i in sorted(witness))


def _execution_json(execution: Execution) -> Dict:
    return {"statements": list(execution.statements),
            "witness": dict(execution.witness)}


def _cmd_cfa_dump(config: RunConfig) -> int:
    sys.stdout.write(dump_cfa(_load_cfa(config)))
    return EXIT_OK


def _cmd_verify(config: RunConfig) -> int:
    cfa = _load_cfa(config)
    aa_in = _load_aa(config, cfa) if config.aa_in else None
    strategy = _strategy(config, cfa, aa_in)
    result = explore(cfa, Spec.assertions(), _budget(config),
                     strategy=strategy, nondet_domain=_domain(config))
    if config.aa_out:
        Path(config.aa_out).write_text(automaton.serialize_aa(result.aa))
    stats = result.art_stats
    if config.format == "structured":
        payload = {
            "program": cfa.name,
            "verdict": result.verdict,
            "nodes_created": stats.nodes_created,
            "nodes_expanded": stats.nodes_expanded,
            "nodes_frontier": stats.nodes_frontier,
            "nodes_covered": stats.nodes_covered,
            "nodes_pruned": stats.nodes_pruned,
            "counterexamples": [_execution_json(e)
                                for e in result.counterexamples],
            "automaton_written": config.aa_out or None,
        }
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        print(f"program: {cfa.name}")
        print(f"verdict: {result.verdict}")
        print(f"nodes created: {stats.nodes_created} "
              f"(expanded {stats.nodes_expanded}, covered {stats.nodes_covered},"
              f" frontier {stats.nodes_frontier}, pruned {stats.nodes_pruned})")
        print(f"counterexamples: {len(result.counterexamples)}")
        for i, execution in enumerate(result.counterexamples):
            stmts = " ".join(str(s) for s in execution.statements)
            line = f"  cex {i}: statements {stmts}"
            if execution.witness:
                line += f"; witness {_witness_text(execution.witness)}"
            print(line)
        if config.aa_out:
            print(f"automaton written to {config.aa_out}")
    if result.verdict == COUNTEREXAMPLES:
        return EXIT_BUG
    if result.verdict == UNKNOWN and not config.aa_out:
        print("error: analysis interrupted and no --aa-out to save the"
              " condition", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _print_report(report: coverage.CoverageReport, fmt: str) -> None:
    if fmt == "structured":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.to_text())


def _cmd_cover_exact(config: RunConfig) -> int:
    cfa = _load_cfa(config)
    aa = _load_aa(config, cfa)
    report = coverage.exact_coverage(cfa, aa, _budget(config),
                                     nondet_domain=_domain(config))
    _print_report(report, config.format)
    return EXIT_OK


def _cmd_cover_under(config: RunConfig) -> int:
    cfa = _load_cfa(config)
    aa = _load_aa(config, cfa)
    strategy = _strategy(config, cfa, aa)
    report = coverage.under_approx_coverage(cfa, aa, _budget(config),
                                            strategy=strategy,
                                            nondet_domain=_domain(config))
    _print_report(report, config.format)
    return EXIT_BUG if report.bug_found else EXIT_OK


def _cmd_score(config: RunConfig) -> int:
    cfa = _load_cfa(config)
    aa = _load_aa(config, cfa)
    scores = heuristic.score(aa, cfa)
    first_use = {state: i for i, state in enumerate(aa.states)}
    ordered = sorted(aa.states,
                     key=lambda s: (-scores.get(s, 0), first_use[s]))
    if config.format == "structured":
        payload = {"program": cfa.name,
                   "scores": {s: scores.get(s, 0) for s in ordered}}
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        for state in ordered:
            print(f"{state} {scores.get(state, 0)}")
    return EXIT_OK


_COMMANDS = {
    "cfa-dump": _cmd_cfa_dump,
    "verify": _cmd_verify,
    "cover-exact": _cmd_cover_exact,
    "cover-under": _cmd_cover_under,
    "score": _cmd_score,
}


def run(config: RunConfig) -> int:
    """Execute one command; never raises for malformed user input."""
    try:
        return _COMMANDS[config.command](config)
    except (_CliError, ParseError, UndeclaredVariable, FormatError,
            StatementIdMismatch, MissingScores, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # The reader went away (e.g. piped into head); silence the final
        # interpreter flush of stdout and call it a success.
        try:
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        except (OSError, ValueError, AttributeError):
            pass
        return EXIT_OK
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _add_budget_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--time-limit", type=float, default=900.0,
                        metavar="SECONDS",
                        help="soft time budget; 0 or less means unlimited"
                             " (default: 900)")
    parser.add_argument("--max-nodes", type=int, default=0, metavar="N",
                        help="stop after creating N tree nodes; 0 means"
                             " unlimited (default: unlimited)")
    parser.add_argument("--max-cex", type=int, default=10, metavar="N",
                        help="keep at most N counterexamples / executions"
                             " (default: 10)")
    parser.add_argument("--nondet-min", type=int, default=-8, metavar="INT",
                        help="smallest value tried for nondet() (default: -8)")
    parser.add_argument("--nondet-max", type=int, default=8, metavar="INT",
                        help="largest value tried for nondet() (default: 8)")


def _add_format_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "structured"),
                        default="text",
                        help="output format (default: text)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vericov",
        description="Statement coverage metrics for interrupted"
                    " verification runs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cfa-dump", help="print a program's control-flow"
                                        " automaton")
    p.add_argument("program")

    p = sub.add_parser("verify", help="run the assertion analysis")
    p.add_argument("program")
    p.add_argument("--strategy", choices=STRATEGIES, default="dfs-postorder")
    p.add_argument("--aa", dest="aa_in", metavar="FILE", default=None,
                   help="automaton used only to derive strategy scores")
    p.add_argument("--aa-out", metavar="FILE", default=None,
                   help="write the assumption automaton of the explored"
                        " region here")
    _add_budget_options(p)
    _add_format_option(p)

    p = sub.add_parser("cover-exact", help="exact statement coverage under"
                                           " an assumption automaton")
    p.add_argument("program")
    p.add_argument("--aa", dest="aa_in", metavar="FILE", required=True)
    _add_budget_options(p)
    _add_format_option(p)

    p = sub.add_parser("cover-under", help="coverage lower bound from"
                                           " generated executions")
    p.add_argument("program")
    p.add_argument("--aa", dest="aa_in", metavar="FILE", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default="dfs-postorder")
    _add_budget_options(p)
    _add_format_option(p)

    p = sub.add_parser("score", help="print per-state exploration scores,"
                                     " highest first")
    p.add_argument("program")
    p.add_argument("--aa", dest="aa_in", metavar="FILE", required=True)
    _add_format_option(p)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command, program=args.program)
    for name in ("time_limit", "max_nodes", "max_cex", "strategy",
                 "nondet_min", "nondet_max", "aa_in", "aa_out", "format"):
        if hasattr(args, name):
            setattr(config, name, getattr(args, name))
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
