"""Mean stopping time by recurrence, closed form and generating functions.

Run from the repository root:

    python tests/recurrence_test.py
"""

import math
import os
import sys
from fractions import Fraction as F

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from exactmath import exp_series
from stoptime.recurrence import (
    f_series,
    functional_equation_residual,
    h_coefficients,
    mean_by_closed_form,
    mean_by_first_step,
    mean_by_recurrence,
    mean_egf,
    mean_table,
)

KNOWN_MEANS = {1: F(0), 2: F(3, 2), 3: F(9, 4), 4: F(45, 14), 5: F(157, 35)}


def test_known_means():
    for n, value in KNOWN_MEANS.items():
        assert mean_by_recurrence(n) == value, f"E_{n}"
    for n in range(2, 6):
        assert mean_by_closed_form(n) == KNOWN_MEANS[n], f"closed form E_{n}"


def test_h_coefficients():
    h = h_coefficients(6)
    assert h.values == [F(3, 4), F(0), F(3, 8), F(3, 5), F(1, 4), F(-3, 7)]
    assert h_coefficients(2).values == [F(3, 4), F(0)]
    assert h.h(6) == F(-3, 7)


def test_closed_form_matches_recurrence():
    for n in range(2, 41):
        assert mean_by_closed_form(n) == mean_by_recurrence(n), f"n={n}"


def test_first_step_matches_recurrence():
    for n in range(1, 25):
        assert mean_by_first_step(n) == mean_by_recurrence(n), f"n={n}"


def test_recurrence_residual():
    for n in range(2, 41):
        means = [mean_by_recurrence(j) for j in range(1, n + 1)]
        rhs = 3 ** (n - 1) + sum(math.comb(n, j) * means[j - 1] for j in range(1, n + 1))
        assert (2 ** n - 1) * means[-1] - rhs == 0, f"n={n}"


def test_means_increase():
    table = mean_table(40)
    assert table.mean(1) == 0
    for n in range(2, 40):
        assert 0 < table.mean(n) < table.mean(n + 1)


def test_functional_equation():
    residual = functional_equation_residual(12)
    assert residual.order == 12
    assert all(c == 0 for c in residual)


def test_f_series_is_mean_over_exp_minus_one():
    order = 10
    e_minus_one = exp_series(1, order + 1) - exp_series(0, order + 1)
    # E(x) = F(x) (e^x - 1) up to x^order
    product = (f_series(order + 1) * e_minus_one).truncate(order)
    assert product == mean_egf(order)


def test_table_bounds():
    for bad in (0, -3):
        try:
            mean_by_recurrence(bad)
        except ValueError:
            continue
        raise AssertionError(f"n={bad} was accepted")
    try:
        mean_table(3).mean(4)
    except ValueError:
        pass
    else:
        raise AssertionError("lookup past the table was accepted")


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
