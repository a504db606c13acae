"""Growth of the mean stopping time.

    (1/3)(3/2)^n <= E_n <= (1/3) n^3 (3/2)^n,    E_n = (1/3)(3/2)^n + r_n,

with r_n = o((3/2)^n). The exact remainder is E_n minus the leading term.
The series representation

    r_n = 1 / (3 (2^n - 1)) * [ (3/2)^n
          + sum_{s=2}^{n} C(n, s) (3/2)^s sum_{l>=1} l^(-s) 2^(delta(l) n) ]

(delta(l) the fractional part of log2 l) is only a cross-check: its l-tail
decays like 2^n / l_max.
"""

import logging
import math
import sys
from fractions import Fraction
from typing import Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from exactmath import SeriesCoefficients, egf_values, exp_series
from models.stoptime import AsymptoticReport
from stoptime.recurrence import mean_by_recurrence, mean_egf
from utils import fractional_log2

logger = logging.getLogger(__name__)

LOG_3_2 = math.log(1.5)
LOG_2 = math.log(2.0)
LOG_FLOAT_MAX = math.log(sys.float_info.max)


def _check_n(n: int):
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")


def leading_term(n: int) -> Fraction:
    return Fraction(1, 3) * Fraction(3, 2) ** n


def bounds(n: int) -> Tuple[Fraction, Fraction]:
    """((1/3)(3/2)^n, (1/3) n^3 (3/2)^n)."""
    _check_n(n)
    lower = leading_term(n)
    return lower, lower * n ** 3


def remainder_exact(n: int) -> Fraction:
    _check_n(n)
    return mean_by_recurrence(n) - leading_term(n)


def delta(l: int) -> float:
    """Fractional part of log2 l."""
    return fractional_log2(l)


def remainder_series(n: int, l_max: int) -> Tuple[float, float]:
    """(approximation, truncation_bound) for r_n from the series with
    l <= l_max.

    The dropped tail is at most 2^n / l_max times the s-sum, because
    2^(delta(l) n) < 2^n and sum_{l > L} l^-s <= 1/L for s >= 2. Sums over
    s are done in the log domain so large n does not overflow.
    """
    _check_n(n)
    if l_max < 1:
        raise ValueError(f"l_max must be at least 1, got {l_max}")

    l = np.arange(1, l_max + 1, dtype=np.float64)
    log_l = np.log(l)
    # frexp gives l = mantissa * 2^exponent with exponent = bit length of l
    mantissa, exponent = np.frexp(l)
    frac = np.where(mantissa == 0.5, 0.0, np.log2(l) - (exponent - 1))
    log_boost = n * LOG_2 * frac

    s = np.arange(2, n + 1)
    log_weights = gammaln(n + 1) - gammaln(s + 1) - gammaln(n - s + 1) + s * LOG_3_2
    log_inner = np.array([logsumexp(log_boost - k * log_l) for k in s])

    log_scale = -math.log(3.0) - (n * LOG_2 + math.log1p(-2.0 ** -n))
    log_bracket = logsumexp(np.concatenate(([n * LOG_3_2], log_weights + log_inner)))
    log_approximation = log_scale + log_bracket
    log_bound = log_scale + logsumexp(log_weights) + n * LOG_2 - math.log(l_max)
    if max(log_approximation, log_bound) > LOG_FLOAT_MAX:
        raise ValueError(f"Remainder series for n={n} exceeds the largest float "
                         f"({sys.float_info.max:.3g}); use the exact remainder instead")
    approximation = math.exp(log_approximation)
    bound = math.exp(log_bound)

    logger.debug("remainder series n=%d l_max=%d: %.12g (+/- %.3g)", n, l_max, approximation, bound)
    return approximation, bound


def remainder_egf(order: int) -> SeriesCoefficients:
    """R(x) = E(x) - (e^{3x/2} - 1 - 3x/2) / 3, the EGF of r_n."""
    if order < 0:
        raise ValueError("Order must be nonnegative")
    leading = (exp_series(Fraction(3, 2), order) - exp_series(0, order)
               - SeriesCoefficients([0, Fraction(3, 2)]).truncate(order)).scale(Fraction(1, 3))
    return mean_egf(order) - leading


def remainder_values(order: int):
    """r_0 .. r_order read off R(x)."""
    return egf_values(remainder_egf(order))


def asymptotic_report(n: int) -> AsymptoticReport:
    _check_n(n)
    mean = mean_by_recurrence(n)
    lower, upper = bounds(n)
    return AsymptoticReport(
        n=n,
        mean=mean,
        lower=lower,
        upper=upper,
        remainder_exact=mean - lower,
        ratio=float(mean) / float(lower),
    )
