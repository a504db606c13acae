"""Stopping-time law from the truncated transition matrix.

Run from the repository root:

    python tests/markov_analysis_test.py
"""

import math
import os
import sys
from fractions import Fraction as F

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from stoptime.game_model import survival_probability
from stoptime.markov_analysis import (
    MgfDomainError,
    exit_time_bound_holds,
    exit_time_mean,
    exit_time_pmf,
    inverse_power,
    mean_by_matrix,
    mgf,
    mgf_threshold,
    pmf_by_first_step,
    pmf_table,
    stopping_time_pmf,
    total_mass,
    variance,
)
from stoptime.recurrence import mean_by_recurrence


def test_pmf_values():
    assert stopping_time_pmf(3, 1) == F(1, 3)
    assert stopping_time_pmf(2, 3) == F(2, 27)
    assert stopping_time_pmf(2, 1) == F(2, 3)


def test_pmf_tables():
    table = pmf_table(2, k_max=2)
    assert table.probs == [F(2, 3), F(2, 9)] and table.tail_mass == F(1, 9)
    table = pmf_table(2, k_max=3)
    assert table.probs == [F(2, 3), F(2, 9), F(2, 27)] and table.tail_mass == F(1, 27)
    table = pmf_table(3, k_max=1)
    assert table.probs == [F(1, 3)] and table.tail_mass == F(2, 3)
    table = pmf_table(4, k_max=1)
    assert table.probs == [F(4, 27)] and table.tail_mass == F(23, 27)


def test_pmf_table_tail_target():
    table = pmf_table(3, tail=1e-6)
    assert float(table.tail_mass) < 1e-6
    shorter = pmf_table(3, k_max=table.k_max - 1)
    assert float(shorter.tail_mass) >= 1e-6
    default = pmf_table(4)
    assert float(default.tail_mass) < 1e-12


def test_pmf_table_arguments():
    for kwargs in ({"k_max": 0}, {"tail": 0.0}, {"tail": 1.5}, {"k_max": 3, "tail": 1e-3}):
        try:
            pmf_table(3, **kwargs)
        except ValueError:
            continue
        raise AssertionError(f"{kwargs} was accepted")


def test_first_step_recursion():
    for n in range(2, 9):
        for k in range(2, 11):
            assert stopping_time_pmf(n, k) == pmf_by_first_step(n, k), f"n={n} k={k}"
    assert pmf_by_first_step(1, 0) == 1
    assert pmf_by_first_step(1, 3) == 0
    assert pmf_by_first_step(3, 0) == 0


def test_total_mass():
    for n in range(2, 21):
        assert total_mass(n) == 1, f"n={n}"


def test_inverse_square_for_four():
    assert inverse_power(4, 2).row(2) == (F(639, 196), F(72, 49), F(729, 196))
    assert mean_by_matrix(4) == F(45, 14)


def test_matrix_mean_matches_recurrence():
    assert mean_by_matrix(2) == F(3, 2)
    assert mean_by_matrix(3) == F(9, 4)
    for n in range(2, 41):
        assert mean_by_matrix(n) == mean_by_recurrence(n), f"n={n}"


def test_variance():
    assert variance(2) == F(3, 4)
    for n in range(2, 21):
        assert variance(n) > 0


def test_variance_against_truncated_sum():
    for n in (3, 4):
        table = pmf_table(n, k_max=400)
        k_max = table.k_max
        partial = sum(k * k * p for k, p in enumerate(table.probs, start=1))
        partial_mean = sum(k * p for k, p in enumerate(table.probs, start=1))
        second = variance(n) + mean_by_matrix(n) ** 2
        # the remaining terms are tiny once the tail has decayed
        assert 0 <= second - partial < F(1, 10 ** 30)
        assert 0 <= mean_by_matrix(n) - partial_mean < F(1, 10 ** 30)
        assert table.tail_mass * k_max ** 2 < F(1, 10 ** 30)


def test_mgf():
    for n in (2, 3, 4):
        assert abs(mgf(n, 0.0) - 1.0) < 1e-12
    assert abs(mgf(2, math.log(0.5)) - 0.4) < 1e-12
    h = 1e-5
    slope = (mgf(4, h) - mgf(4, -h)) / (2 * h)
    assert abs(slope - 45 / 14) <= 1e-6 * 45 / 14


def test_mgf_domain():
    threshold = mgf_threshold(4)
    assert abs(threshold + math.log(13 / 27)) < 1e-12
    try:
        mgf(4, threshold + 0.01)
    except MgfDomainError as e:
        assert e.threshold == threshold
    else:
        raise AssertionError("divergent MGF was evaluated")


def test_exit_time_pmf():
    assert exit_time_pmf(2, 2) == F(2, 9)
    assert exit_time_pmf(4, 2) == F(182, 729)
    for n in (2, 5, 9):
        assert exit_time_pmf(n, 1) == 1 - survival_probability(n, n)
        stay = survival_probability(n, n)
        assert sum(exit_time_pmf(n, k) for k in range(1, 16)) == 1 - stay ** 15


def test_exit_time_mean():
    assert exit_time_mean(2).mean == F(3, 2)
    assert exit_time_mean(3).mean == F(3, 2)
    assert exit_time_mean(4).mean == F(27, 14)
    for n in range(2, 21):
        assert exit_time_mean(n).mean <= mean_by_matrix(n)
    for n in range(2, 41):
        assert exit_time_bound_holds(n)


def main():
    failures = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"  OK   {name}")
            except AssertionError as e:
                failures += 1
                print(f"  FAIL {name}: {e}")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
