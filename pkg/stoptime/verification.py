"""Exact invariant suite run by ``cli.py verify``.

Each check walks n = 2..n_max and stops at its first violation. The round
law is injectable so a tampered model can be audited the same way as the
real one.
"""

import logging
from fractions import Fraction
from typing import Callable, Dict, List

from models.stoptime import CheckResult, VerificationSummary
from stoptime.asymptotics import bounds
from stoptime.game_model import (
    SurvivalFn,
    build_truncated_chain,
    decisive_probability,
    survival_probability,
    survivor_distribution_by_enumeration,
    transition_row,
)
from stoptime.markov_analysis import chain_fundamental, chain_mean, chain_total_mass
from stoptime.recurrence import mean_by_closed_form, mean_by_recurrence

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 6


class ConsistencyError(RuntimeError):
    """Two exact routes disagree or an exact invariant fails."""

    def __init__(self, invariant: str, detail: str = ""):
        super().__init__(f"Invariant '{invariant}' failed" + (f": {detail}" if detail else ""))
        self.invariant = invariant
        self.detail = detail


def mean_by_all_methods(n: int, probability: SurvivalFn = survival_probability) -> Dict[str, Fraction]:
    """E_n by recurrence, closed form and matrix; raises ConsistencyError
    unless all three agree exactly."""
    chain = build_truncated_chain(n, probability)
    values = {
        "recurrence": mean_by_recurrence(n),
        "closed-form": mean_by_closed_form(n),
        "matrix": chain_mean(chain, chain_fundamental(chain)),
    }
    if len(set(values.values())) != 1:
        detail = ", ".join(f"{k}={v}" for k, v in values.items())
        raise ConsistencyError("cross_method_mean", f"n={n}: {detail}")
    return values


# ----------------------------------------------------------------------
# Checks: each returns an error message or "" for n
# ----------------------------------------------------------------------
def _row_sums(n: int, probability: SurvivalFn) -> str:
    total = sum(transition_row(n, probability), Fraction(0))
    return "" if total == 1 else f"row {n} sums to {total}"


def _diagonal(n: int, probability: SurvivalFn) -> str:
    stay = probability(n, n)
    if not 0 < stay < 1:
        return f"p({n},{n}) = {stay} is outside (0, 1)"
    if 1 - stay != decisive_probability(n):
        return f"1 - p({n},{n}) = {1 - stay}, expected {decisive_probability(n)}"
    return ""


def _enumeration(n: int, probability: SurvivalFn) -> str:
    if n > ENUMERATION_LIMIT:
        return ""
    for j, p in survivor_distribution_by_enumeration(n).items():
        if probability(n, j) != p:
            return f"p({n},{j}) = {probability(n, j)}, enumeration gives {p}"
    return ""


def _normalization(n: int, probability: SurvivalFn) -> str:
    chain = build_truncated_chain(n, probability)
    mass = chain_total_mass(chain, chain_fundamental(chain))
    return "" if mass == 1 else f"total mass for n={n} is {mass}"


def _cross_method(n: int, probability: SurvivalFn) -> str:
    try:
        mean_by_all_methods(n, probability)
    except ConsistencyError as e:
        return e.detail
    return ""


def _sandwich(n: int, probability: SurvivalFn) -> str:
    lower, upper = bounds(n)
    mean = mean_by_recurrence(n)
    return "" if lower <= mean <= upper else f"E_{n} = {mean} outside [{lower}, {upper}]"


def _exit_time(n: int, probability: SurvivalFn) -> str:
    stay = probability(n, n)
    if stay >= 1:
        return f"p({n},{n}) = {stay} leaves no exit"
    lower, _ = bounds(n)
    exit_mean = 1 / (1 - stay)
    if not lower <= exit_mean <= mean_by_recurrence(n):
        return f"exit-time mean {exit_mean} for n={n} breaks lower <= E(T_ex) <= E_n"
    return ""


CHECKS: List[tuple] = [
    ("row_sums", _row_sums),
    ("diagonal_closed_form", _diagonal),
    ("round_enumeration", _enumeration),
    ("normalization", _normalization),
    ("cross_method_mean", _cross_method),
    ("bound_sandwich", _sandwich),
    ("exit_time_bound", _exit_time),
]


def _run_check(name: str, check: Callable[[int, SurvivalFn], str], n_max: int,
               probability: SurvivalFn) -> CheckResult:
    checked = 0
    for n in range(2, n_max + 1):
        try:
            error = check(n, probability)
        except (ValueError, ZeroDivisionError) as e:
            error = f"n={n}: {e}"
        if error:
            logger.info("Check %s failed: %s", name, error)
            return CheckResult(name=name, passed=False, checked=checked, detail=error)
        checked += 1
    return CheckResult(name=name, passed=True, checked=checked)


def run_verification(n_max: int, probability: SurvivalFn = survival_probability) -> VerificationSummary:
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    results = [_run_check(name, check, n_max, probability) for name, check in CHECKS]
    return VerificationSummary(n_max=n_max, values_checked=n_max - 1, checks=results)


def require_passed(summary: VerificationSummary):
    failure = summary.first_failure
    if failure is not None:
        raise ConsistencyError(failure.name, failure.detail)
