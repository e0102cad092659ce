"""Command-line front end: ``contentq analyze | subgroups | power``.

Exit status reports whether the command ran, not the test decision:
0 on success, 2 on I/O or parse errors, 3 on invalid configuration.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .cochran import DEFAULT_EXACT_CUTOFF, DEFAULT_MC_REPLICATES, METHODS, PermutationBudget
from .condition import RETAINED, ROW_ALIGNMENTS, ConditionSpec, format_w_csv
from .judgements import MIN_SPECIALISTS, JudgementFormatError, read_judgement_csv, validate_matrix
from .pipeline import analyze
from .powersim import builtin_scenario, builtin_scenarios, estimate_power, load_scenario
from .report import (
    analysis_to_dict,
    dumps,
    format_power_csv,
    power_to_dict,
    render_analysis,
    render_power,
    render_subgroups,
    subgroups_to_dict,
)
from .subgroup import MIN_SUBGROUP, analyze_subgroups, format_subgroup_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3


class ConfigError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _method(value: str) -> str:
    if value not in METHODS:
        raise argparse.ArgumentTypeError(f"choose from {', '.join(METHODS)}")
    return value


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="judgement CSV file")
    cond = p.add_mutually_exclusive_group()
    cond.add_argument("--ci", type=float, help="concordance index percent (default 50)")
    cond.add_argument("--cvr", type=float, help="content validity ratio threshold")
    p.add_argument("--dimensions", help="comma-separated dimension labels to declare")
    p.add_argument("--method", type=_method, default="auto", help="exact | mc | asymptotic | auto")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mc-reps", type=int, default=DEFAULT_MC_REPLICATES)
    p.add_argument("--exact-cutoff", type=int, default=DEFAULT_EXACT_CUTOFF)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-specialists", type=int, default=MIN_SPECIALISTS,
                   help="smallest accepted panel (default 6)")
    p.add_argument("--row-alignment", choices=ROW_ALIGNMENTS, default=RETAINED,
                   help="'leading' regenerates results computed from the first v rows")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="contentq", description="Cochran's Q analysis of specialist judgements.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="retention, W table and Q test for the whole panel")
    _add_common(a)

    g = sub.add_parser("subgroups", help="rank every specialist sub-panel by p-value")
    _add_common(g)
    g.set_defaults(method="asymptotic")
    g.add_argument("--min-size", type=int, default=MIN_SUBGROUP)
    g.add_argument("--max-size", type=int, help="default: panel size minus one")
    g.add_argument("--no-full", action="store_true", help="leave the whole panel out")
    g.add_argument("--top", type=int, help="show only the first K entries")

    w = sub.add_parser("power", help="estimate power by simulation")
    src = w.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", help="builtin scenario name, or 'all'")
    src.add_argument("--scenario", help="scenario JSON file")
    w.add_argument("--replicates", type=int, default=50_000)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--row-alignment", choices=ROW_ALIGNMENTS, default=RETAINED)
    w.add_argument("--format", choices=("text", "json", "csv"), default="text")
    w.add_argument("--workers", type=int, default=1)
    return parser


def _condition(args) -> ConditionSpec:
    if args.cvr is not None:
        return ConditionSpec.validity_ratio(args.cvr)
    return ConditionSpec.concordance(50 if args.ci is None else args.ci)


def _budget(args) -> PermutationBudget:
    return PermutationBudget(exact_cutoff=args.exact_cutoff, mc_replicates=args.mc_reps, seed=args.seed)


def _load(args):
    dims = [d.strip() for d in args.dimensions.split(",")] if args.dimensions else None
    try:
        matrix = read_judgement_csv(args.input, dimensions=dims)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror or exc}") from exc
    except JudgementFormatError as exc:
        raise InputError("\n".join(f"{args.input}: {loc}: {msg}" for loc, msg in exc.errors)) from exc
    except ValueError as exc:
        raise InputError(f"{args.input}: {exc}") from exc
    report = validate_matrix(matrix, min_specialists=args.min_specialists)
    if report.errors:
        raise InputError("\n".join(f"{args.input}: {loc}: {msg}" for loc, msg in report.errors))
    return matrix, report


def cmd_analyze(args, out) -> int:
    condition = _condition(args)
    budget = _budget(args)
    matrix, report = _load(args)
    try:
        result = analyze(matrix, condition, method=args.method, budget=budget, alpha=args.alpha,
                         row_alignment=args.row_alignment, workers=args.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.format == "json":
        out.write(dumps(analysis_to_dict(matrix, result, report)))
    elif args.format == "csv":
        out.write(format_w_csv(result.w))
    else:
        out.write(render_analysis(matrix, result, report))
    return EXIT_OK


def cmd_subgroups(args, out) -> int:
    condition = _condition(args)
    budget = _budget(args)
    if args.top is not None and args.top < 1:
        raise ConfigError("--top must be positive")
    matrix, _ = _load(args)
    try:
        report = analyze_subgroups(
            matrix, condition, method=args.method, budget=budget, alpha=args.alpha,
            min_size=args.min_size, max_size=args.max_size, include_full=not args.no_full,
            row_alignment=args.row_alignment, workers=args.workers,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.format == "json":
        out.write(dumps(subgroups_to_dict(report, args.top)))
    elif args.format == "csv":
        out.write(format_subgroup_csv(report, args.top))
    else:
        out.write(render_subgroups(report, args.top))
    return EXIT_OK


def cmd_power(args, out) -> int:
    if args.scenario:
        try:
            specs = [load_scenario(args.scenario)]
        except OSError as exc:
            raise InputError(f"cannot read {args.scenario}: {exc.strerror or exc}") from exc
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{args.scenario}: invalid scenario: {exc}") from exc
    elif args.builtin == "all":
        specs = builtin_scenarios()
    else:
        try:
            specs = [builtin_scenario(args.builtin)]
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from exc
    try:
        estimates = [
            estimate_power(spec, args.replicates, seed=args.seed, workers=args.workers,
                           row_alignment=args.row_alignment)
            for spec in specs
        ]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.format == "json":
        out.write(dumps(power_to_dict(estimates)))
    elif args.format == "csv":
        out.write(format_power_csv(estimates))
    else:
        out.write(render_power(estimates))
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "subgroups": cmd_subgroups, "power": cmd_power}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except ConfigError as exc:
        err.write(f"contentq: invalid configuration: {exc}\n")
        return EXIT_CONFIG
    except InputError as exc:
        err.write(f"contentq: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
