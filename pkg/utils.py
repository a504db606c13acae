"""Small numeric helpers shared by the analysis modules and the emitter."""

import math
from decimal import Context, Decimal
from fractions import Fraction


def decimal_string(value: Fraction, digits: int = 15) -> str:
    """Correctly rounded decimal expansion of ``value`` to ``digits``
    significant digits."""
    value = Fraction(value)
    ctx = Context(prec=digits)
    result = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    return str(result)


def fractional_log2(l: int) -> float:
    """delta(l) = log2(l) - floor(log2(l)), in [0, 1).

    The integer part comes from the bit length, so exact powers of two give
    exactly 0.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    floor_log = l.bit_length() - 1
    if l == 1 << floor_log:
        return 0.0
    return math.log2(l) - floor_log


def format_fraction(value: Fraction) -> str:
    """``num/den`` form used in CSV output and log lines."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"
