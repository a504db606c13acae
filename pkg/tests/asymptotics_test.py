"""Growth bounds and the remainder of the mean stopping time.

Run from the repository root:

    python tests/asymptotics_test.py
"""

import math
import os
import sys
from fractions import Fraction as F

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from stoptime.asymptotics import (
    asymptotic_report,
    bounds,
    delta,
    leading_term,
    remainder_exact,
    remainder_series,
    remainder_values,
)
from stoptime.recurrence import mean_by_recurrence


def test_bounds_values():
    assert bounds(2) == (F(3, 4), F(6))
    assert bounds(4) == (F(27, 16), F(108))
    lower, upper = bounds(10)
    assert lower == F(1, 3) * F(3, 2) ** 10
    assert upper == F(1000, 3) * F(3, 2) ** 10


def test_bound_sandwich():
    for n in range(2, 61):
        lower, upper = bounds(n)
        assert lower <= mean_by_recurrence(n) <= upper, f"n={n}"


def test_remainder_exact():
    assert remainder_exact(2) == F(3, 4)
    assert remainder_exact(3) == F(9, 8)
    assert remainder_exact(4) == F(171, 112)
    for n in range(2, 30):
        assert remainder_exact(n) + leading_term(n) == mean_by_recurrence(n)


def test_remainder_generating_function():
    values = remainder_values(12)
    for n in range(2, 13):
        assert values[n] == remainder_exact(n), f"n={n}"


def test_delta():
    assert delta(1) == 0.0
    assert delta(2) == 0.0
    assert abs(delta(3) - (math.log2(3) - 1)) < 1e-15
    for m in range(0, 60):
        assert delta(2 ** m) == 0.0
    for l in range(1, 5000):
        assert 0.0 <= delta(l) < 1.0


def test_series_agrees_with_exact():
    for n in range(2, 11):
        approximation, bound = remainder_series(n, 10 ** 6)
        assert bound > 0
        assert abs(approximation - float(remainder_exact(n))) <= bound + 1e-9, f"n={n}"


def test_series_beyond_float_range():
    try:
        remainder_series(2000, 10)
    except ValueError as e:
        assert "largest float" in str(e)
    else:
        raise AssertionError("overflowing series returned a value")


def test_series_error_shrinks_with_l_max():
    exact = float(remainder_exact(4))
    coarse, coarse_bound = remainder_series(4, 100)
    fine, fine_bound = remainder_series(4, 100_000)
    assert fine_bound < coarse_bound
    assert abs(fine - exact) <= abs(coarse - exact)


def test_report_ratio():
    assert asymptotic_report(2).ratio == 2.0
    report = asymptotic_report(4)
    assert abs(report.ratio - 40 / 21) < 1e-12
    assert report.remainder_exact == F(171, 112)
    assert asymptotic_report(60).ratio < asymptotic_report(10).ratio
    ratios = [asymptotic_report(n).ratio for n in (10, 20, 30, 40, 50, 60)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


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
