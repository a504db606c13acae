"""Mean stopping times from the first-step recurrence and its generating
functions.

Conditioning on the first round gives E_n = sum_j p(n, j) (E_j + 1), which
with the round law becomes

    (2^n - 1) E_n = 3^(n-1) + sum_{j=1}^{n} C(n, j) E_j,    E_1 = 0.

The j = n term carries E_n to the left, so E_n is solved with divisor
2^n - 2. Through the exponential generating function E(x) the same
sequence has the closed form

    E_n = sum_{k=1}^{n-1} C(n, k) h_k / (2^k - 1),

where h_k / k! are the coefficients of h(x) = (e^{3x} - 1 - 3x) / (3 (e^{2x} - 1)).
"""

import logging
import math
import threading
from fractions import Fraction
from typing import List

from exactmath import (
    SeriesCoefficients,
    egf_values,
    exp_series,
    from_egf_values,
    series_divide,
)
from models.stoptime import HCoefficients, MeanTable
from stoptime.game_model import survival_probability

logger = logging.getLogger(__name__)

_lock = threading.Lock()
_means: List[Fraction] = [Fraction(0)]  # E_1, E_2, ...
_h_values: List[Fraction] = []  # h_1, h_2, ...


def _extend_means(max_n: int):
    with _lock:
        if len(_means) >= max_n:
            return
        logger.info("Extending mean table from n=%d to n=%d", len(_means), max_n)
        for n in range(len(_means) + 1, max_n + 1):
            rhs = 3 ** (n - 1) + sum(
                (math.comb(n, j) * _means[j - 1] for j in range(1, n)), Fraction(0)
            )
            _means.append(rhs / (2 ** n - 2))


def mean_table(max_n: int) -> MeanTable:
    if max_n < 1:
        raise ValueError(f"max_n must be at least 1, got {max_n}")
    _extend_means(max_n)
    return MeanTable(max_n=max_n, values=list(_means[:max_n]))


def mean_by_recurrence(n: int) -> Fraction:
    """E_n from the recurrence, built bottom-up from E_1 = 0."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    _extend_means(n)
    return _means[n - 1]


def mean_by_first_step(n: int) -> Fraction:
    """E_n straight from E_n = sum_j p(n, j) (E_j + 1), solved for E_n.

    Uses the round probabilities rather than the simplified integer
    recurrence, so the two routes check each other.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if n == 1:
        return Fraction(0)
    stay = survival_probability(n, n)
    rhs = 1 + sum((survival_probability(n, j) * mean_by_recurrence(j) for j in range(1, n)),
                  Fraction(0))
    return rhs / (1 - stay)


# ----------------------------------------------------------------------
# Generating functions
# ----------------------------------------------------------------------
def h_series(order: int) -> SeriesCoefficients:
    """Ordinary coefficients of h(x) up to x^order."""
    # numerator and denominator both vanish at 0; one extra term survives
    # the cancellation of x
    numerator = (exp_series(3, order + 1) - exp_series(0, order + 1)
                 - SeriesCoefficients([0, 3]).truncate(order + 1)).scale(Fraction(1, 3))
    denominator = exp_series(2, order + 1) - exp_series(0, order + 1)
    return series_divide(numerator, denominator, order)


def h_coefficients(max_k: int) -> HCoefficients:
    """h_1 .. h_max_k, where h_k = k! [x^k] h(x)."""
    if max_k < 1:
        raise ValueError(f"max_k must be at least 1, got {max_k}")
    with _lock:
        if len(_h_values) < max_k:
            # grow geometrically so repeated calls do not redo the division
            target = max(max_k, 2 * len(_h_values))
            logger.info("Computing h coefficients up to k=%d", target)
            values = egf_values(h_series(target))
            _h_values[:] = values[1:]
        values = list(_h_values[:max_k])
    return HCoefficients(max_k=max_k, values=values)


def mean_by_closed_form(n: int) -> Fraction:
    """E_n = sum_{k=1}^{n-1} C(n, k) h_k / (2^k - 1)."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    h = h_coefficients(n - 1)
    return sum((math.comb(n, k) * h.h(k) / (2 ** k - 1) for k in range(1, n)), Fraction(0))


def mean_egf(order: int) -> SeriesCoefficients:
    """E(x) = sum_n E_n x^n / n!, with E_0 = E_1 = 0."""
    if order < 0:
        raise ValueError("Order must be nonnegative")
    return from_egf_values([Fraction(0)] + [mean_by_recurrence(n) for n in range(1, order + 1)])


def f_series(order: int) -> SeriesCoefficients:
    """F(x) = E(x) / (e^x - 1) = sum_k h_k x^k / (k! (2^k - 1))."""
    if order < 1:
        raise ValueError("Order must be at least 1")
    h = h_coefficients(order)
    return from_egf_values([Fraction(0)] + [h.h(k) / (2 ** k - 1) for k in range(1, order + 1)])


def functional_equation_residual(order: int) -> SeriesCoefficients:
    """Coefficients of E(2x) - (e^x + 1) E(x) - (e^{3x} - 1 - 3x) / 3.

    All of them vanish when the mean table satisfies the recurrence.
    """
    e = mean_egf(order)
    one = exp_series(0, order)
    forcing = (exp_series(3, order) - one
               - SeriesCoefficients([0, 3]).truncate(order)).scale(Fraction(1, 3))
    return e.dilate(2) - (exp_series(1, order) + one) * e - forcing
