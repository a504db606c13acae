#!/usr/bin/env python
"""Command-line entry point for the stopping-time computations.

    python cli.py mean --n 4 --method all
    python cli.py pmf --n 3 --tail 1e-6 --format csv
    python cli.py simulate --n 4 --trials 1000000 --seed 42
    python cli.py verify --n-max 20

Every command emits ``OutputRecord``s (JSON Lines by default, or CSV) to
stdout or ``--output``. Exit codes: 0 success, 1 usage error, 2 failed
consistency check.
"""

import argparse
import json
import logging
import sys
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from emitter import emit
from models.stoptime import MeanMethod, OutputFormat, OutputRecord, Quantity
from settings import load_settings
from stoptime.asymptotics import bounds, remainder_exact, remainder_series
from stoptime.markov_analysis import exit_time_bound_holds, exit_time_mean, mean_by_matrix, pmf_table, variance
from stoptime.recurrence import mean_by_closed_form, mean_by_recurrence
from stoptime.simulator import chi_square_fit, estimate
from stoptime.verification import ConsistencyError, mean_by_all_methods, require_passed, run_verification
from utils import format_fraction

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONSISTENT = 2

DEFAULT_L_MAX = 10 ** 6


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse reports usage errors with exit code 1 here, not 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------
MEAN_METHODS: Dict[MeanMethod, Callable] = {
    MeanMethod.RECURRENCE: mean_by_recurrence,
    MeanMethod.CLOSED_FORM: mean_by_closed_form,
    MeanMethod.MATRIX: mean_by_matrix,
}


def cmd_mean(args) -> List[OutputRecord]:
    method = MeanMethod(args.method)
    if args.n < 1:
        raise ValueError(f"--n must be at least 1, got {args.n}")
    if method == MeanMethod.ALL:
        if args.n == 1:
            values = {m.value: mean_by_recurrence(1) for m in MEAN_METHODS}
        else:
            values = mean_by_all_methods(args.n)
        return [OutputRecord.from_exact(args.n, Quantity.MEAN, v, method=m) for m, v in values.items()]
    # tau_1 = 0 whichever way it is computed
    value = mean_by_recurrence(1) if args.n == 1 else MEAN_METHODS[method](args.n)
    return [OutputRecord.from_exact(args.n, Quantity.MEAN, value, method=method.value)]


def cmd_pmf(args) -> List[OutputRecord]:
    table = pmf_table(args.n, k_max=args.k_max, tail=args.tail)
    records = [OutputRecord.from_exact(args.n, Quantity.PMF, p, k=k)
               for k, p in enumerate(table.probs, start=1)]
    records.append(OutputRecord.from_exact(args.n, Quantity.PMF, table.tail_mass, k="tail"))
    return records


def cmd_variance(args) -> List[OutputRecord]:
    return [OutputRecord.from_exact(args.n, Quantity.VARIANCE, variance(args.n), method="matrix")]


def cmd_bounds(args) -> List[OutputRecord]:
    lower, upper = bounds(args.n)
    return [
        OutputRecord.from_exact(args.n, Quantity.BOUNDS, lower, bound="lower"),
        OutputRecord.from_exact(args.n, Quantity.BOUNDS, upper, bound="upper"),
    ]


def cmd_remainder(args) -> List[OutputRecord]:
    approximation, truncation = remainder_series(args.n, args.l_max)
    exact = remainder_exact(args.n)
    return [
        OutputRecord.from_exact(args.n, Quantity.REMAINDER, exact, method="exact"),
        OutputRecord.from_float(args.n, Quantity.REMAINDER, approximation, method="series",
                                l_max=args.l_max, truncation_bound=repr(truncation)),
    ]


def cmd_exit(args) -> List[OutputRecord]:
    law = exit_time_mean(args.n)
    return [OutputRecord.from_exact(args.n, Quantity.EXIT_TIME, law.mean,
                                    stay_prob=format_fraction(law.stay_prob),
                                    bound_holds=str(exit_time_bound_holds(args.n, law)).lower())]


def cmd_simulate(args) -> List[OutputRecord]:
    report = estimate(args.n, args.trials, args.seed, settings=args.settings)
    fit = chi_square_fit(report)
    histogram = json.dumps({str(k): c for k, c in report.histogram.items()}, separators=(",", ":"))
    return [OutputRecord.from_float(
        args.n, Quantity.SIMULATION, report.mean,
        seed=report.seed,
        trials=report.trials,
        rng=report.rng,
        block_size=report.block_size,
        variance=repr(report.variance),
        std_error=repr(report.std_error),
        max_k_observed=report.max_k_observed,
        histogram=histogram,
        chi_square=repr(fit.statistic),
        p_value=repr(fit.p_value),
    )]


def cmd_verify(args) -> List[OutputRecord]:
    summary = run_verification(args.n_max)
    failure = summary.first_failure
    checks = ";".join(f"{c.name}:{'pass' if c.passed else 'fail'}" for c in summary.checks)
    record = OutputRecord(
        n=args.n_max,
        quantity=Quantity.VERIFY,
        metadata={
            "status": "pass" if summary.passed else "fail",
            "checks": checks,
            "values_checked": str(summary.values_checked),
            "first_failure": f"{failure.name}: {failure.detail}" if failure else "none",
        },
    )
    args.verification = summary
    return [record]


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------
def _add_output_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value,
                        help="Output format (default: json)")
    parser.add_argument("--output", help="Write records to this file instead of stdout")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="cli.py", description="Stopping time of n-player Rock-Paper-Scissors")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("mean", help="Exact mean stopping time E_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=[m.value for m in MeanMethod], default=MeanMethod.RECURRENCE.value)
    p.set_defaults(handler=cmd_mean)

    p = sub.add_parser("pmf", help="Exact mass function table with its tail")
    p.add_argument("--n", type=int, required=True)
    limit = p.add_mutually_exclusive_group()
    limit.add_argument("--k-max", type=int, help="Number of rows")
    limit.add_argument("--tail", type=float, help="Stop once the remaining mass is below this")
    p.set_defaults(handler=cmd_pmf)

    p = sub.add_parser("variance", help="Exact variance of the stopping time")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=cmd_variance)

    p = sub.add_parser("bounds", help="Lower and upper growth bounds for E_n")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("remainder", help="Remainder r_n, exact and from the series")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l-max", type=int, default=DEFAULT_L_MAX)
    p.set_defaults(handler=cmd_remainder)

    p = sub.add_parser("exit", help="Mean exit time from the initial state")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=cmd_exit)

    p = sub.add_parser("simulate", help="Seeded Monte Carlo estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("verify", help="Run the exact invariant suite")
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(handler=cmd_verify)

    for name in ("mean", "pmf", "variance", "bounds", "remainder", "exit", "simulate", "verify"):
        _add_output_flags(sub.choices[name])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        settings = load_settings()
    except ValidationError as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=settings.log_level, stream=sys.stderr)

    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    args.settings = settings
    args.verification = None

    logger.info("Running %s", args.command)
    try:
        records = args.handler(args)
        emit(records, OutputFormat(args.format), args.output)
        if args.verification is not None:
            require_passed(args.verification)
    except ConsistencyError as e:
        print(f"Consistency check failed: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (ValueError, ValidationError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        logger.error("Command %s failed", args.command, exc_info=True)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
