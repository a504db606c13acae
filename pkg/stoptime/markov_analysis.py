"""Law of the stopping time tau_n through the truncated transition matrix.

With P_n the transitions among the transient states 2..n and psi_n the
one-step absorption probabilities, the state-n entries of

    P_n^(k-1) psi_n              give P(tau_n = k),
    (I - P_n)^-2 psi_n           give E(tau_n),
    (I + P_n)(I - P_n)^-3 psi_n  give E(tau_n^2),
    e^t (I - e^t P_n)^-1 psi_n   give the MGF.

All results are exact except ``mgf``, which is evaluated in floating point.
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional

import numpy as np
from scipy.linalg import solve_triangular

from exactmath import (
    LowerTriangularMatrix,
    invert_lower_triangular,
    matrix_power_apply,
)
from models.stoptime import ExitTimeLaw, StoppingTimePMF, TruncatedChain
from stoptime.game_model import build_truncated_chain, survival_probability

logger = logging.getLogger(__name__)

# Default table length: stop once the exact tail drops below this
DEFAULT_TAIL = 1e-12
MAX_TABLE_ROUNDS = 10_000


class MgfDomainError(ValueError):
    """The MGF diverges: e^t p(n, n) >= 1."""

    def __init__(self, n: int, t: float, threshold: float):
        super().__init__(f"MGF of tau_{n} diverges at t={t}; it is finite only for t < {threshold}")
        self.n = n
        self.t = t
        self.threshold = threshold


def _check_n(n: int):
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")


def _check_k(k: int):
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")


# ----------------------------------------------------------------------
# Fundamental matrix
# ----------------------------------------------------------------------
def chain_fundamental(chain: TruncatedChain) -> LowerTriangularMatrix:
    identity = LowerTriangularMatrix.identity(chain.matrix.dim)
    return invert_lower_triangular(identity - chain.matrix)


@lru_cache(maxsize=128)
def fundamental_matrix(n: int) -> LowerTriangularMatrix:
    """(I - P_n)^-1."""
    _check_n(n)
    return chain_fundamental(build_truncated_chain(n))


def inverse_power(n: int, m: int) -> LowerTriangularMatrix:
    """(I - P_n)^-m as a matrix."""
    _check_n(n)
    if m < 0:
        raise ValueError("Power must be nonnegative")
    base = fundamental_matrix(n)
    result = LowerTriangularMatrix.identity(base.dim)
    for _ in range(m):
        result = result @ base
    return result


def chain_total_mass(chain: TruncatedChain, fundamental: LowerTriangularMatrix) -> Fraction:
    return chain.at_initial_state(fundamental.apply(chain.psi))


def chain_mean(chain: TruncatedChain, fundamental: LowerTriangularMatrix) -> Fraction:
    return chain.at_initial_state(matrix_power_apply(fundamental, 2, chain.psi))


def total_mass(n: int) -> Fraction:
    """State-n entry of (I - P_n)^-1 psi_n, i.e. P(tau_n < infinity)."""
    _check_n(n)
    return chain_total_mass(build_truncated_chain(n), fundamental_matrix(n))


# ----------------------------------------------------------------------
# Mass function
# ----------------------------------------------------------------------
def stopping_time_pmf(n: int, k: int) -> Fraction:
    """P(tau_n = k) = (P_n^(k-1) psi_n)(n)."""
    _check_n(n)
    _check_k(k)
    chain = build_truncated_chain(n)
    return chain.at_initial_state(matrix_power_apply(chain.matrix, k - 1, chain.psi))


def pmf_table(n: int, k_max: Optional[int] = None, tail: Optional[float] = None) -> StoppingTimePMF:
    """p_n(1..K) by iterating psi_n through P_n, with the exact tail mass.

    With ``k_max`` the table has exactly that many rows. Otherwise it grows
    until the exact tail falls below ``tail`` (default 1e-12), capped at
    10,000 rows.
    """
    _check_n(n)
    if k_max is not None and tail is not None:
        raise ValueError("Give either k_max or tail, not both")
    if k_max is not None:
        _check_k(k_max)
    if tail is None:
        tail = DEFAULT_TAIL
    elif not 0 < tail < 1:
        raise ValueError(f"tail must lie in (0, 1), got {tail}")

    chain = build_truncated_chain(n)
    vector = list(chain.psi)
    probs: List[Fraction] = []
    remaining = Fraction(1)
    limit = k_max if k_max is not None else MAX_TABLE_ROUNDS

    while len(probs) < limit:
        p = chain.at_initial_state(vector)
        probs.append(p)
        remaining -= p
        if k_max is None and float(remaining) < tail:
            break
        vector = chain.matrix.apply(vector)
    else:
        if k_max is None:
            logger.warning("pmf table for n=%d capped at %d rounds with tail %.3g",
                           n, MAX_TABLE_ROUNDS, float(remaining))

    return StoppingTimePMF(n=n, probs=probs, tail_mass=remaining)


@lru_cache(maxsize=4096)
def pmf_by_first_step(n: int, k: int) -> Fraction:
    """P(tau_n = k) from P(tau_n = k) = sum_j p(n, j) P(tau_j = k - 1).

    Boundary values: tau_1 = 0, so P(tau_1 = 0) = 1 and P(tau_j = 0) = 0
    for j >= 2.
    """
    if n < 1 or k < 0:
        raise ValueError(f"Invalid arguments n={n}, k={k}")
    if k == 0:
        return Fraction(1 if n == 1 else 0)
    if n == 1:
        return Fraction(0)
    return sum((survival_probability(n, j) * pmf_by_first_step(j, k - 1) for j in range(1, n + 1)),
               Fraction(0))


# ----------------------------------------------------------------------
# Moments
# ----------------------------------------------------------------------
def mean_by_matrix(n: int) -> Fraction:
    """E(tau_n) = ((I - P_n)^-2 psi_n)(n)."""
    _check_n(n)
    return chain_mean(build_truncated_chain(n), fundamental_matrix(n))


def second_moment(n: int) -> Fraction:
    """E(tau_n^2) = ((I + P_n)(I - P_n)^-3 psi_n)(n)."""
    _check_n(n)
    chain = build_truncated_chain(n)
    cubed = matrix_power_apply(fundamental_matrix(n), 3, chain.psi)
    shifted = chain.matrix.apply(cubed)
    return chain.at_initial_state([a + b for a, b in zip(cubed, shifted)])


def variance(n: int) -> Fraction:
    _check_n(n)
    return second_moment(n) - mean_by_matrix(n) ** 2


def mgf_threshold(n: int) -> float:
    """Largest t for which the MGF of tau_n is finite (exclusive)."""
    _check_n(n)
    stay = max(build_truncated_chain(n).matrix.diagonal())
    return -math.log(stay)


def mgf(n: int, t: float) -> float:
    """E(e^{t tau_n}) in floating point."""
    _check_n(n)
    threshold = mgf_threshold(n)
    if not t < threshold:
        raise MgfDomainError(n, t, threshold)

    chain = build_truncated_chain(n)
    growth = math.exp(t)
    p = np.array([[float(x) for x in row] for row in chain.matrix.rows])
    psi = np.array([float(x) for x in chain.psi])
    system = np.eye(len(psi)) - growth * p
    solution = solve_triangular(system, psi, lower=True)
    return float(growth * solution[-1])


# ----------------------------------------------------------------------
# Exit time from the initial state
# ----------------------------------------------------------------------
def exit_time_pmf(n: int, k: int) -> Fraction:
    """P(T_ex = k) = p(n, n)^(k-1) - p(n, n)^k."""
    _check_n(n)
    _check_k(k)
    stay = survival_probability(n, n)
    return stay ** (k - 1) - stay ** k


def exit_time_mean(n: int) -> ExitTimeLaw:
    _check_n(n)
    stay = survival_probability(n, n)
    return ExitTimeLaw(n=n, stay_prob=stay, mean=1 / (1 - stay))


def exit_time_bound_holds(n: int, law: Optional[ExitTimeLaw] = None) -> bool:
    """(1/3)(3/2)^n <= 1 / (1 - p(n, n))."""
    _check_n(n)
    if law is None:
        stay = survival_probability(n, n)
        mean = 1 / (1 - stay)
    else:
        mean = law.mean
    return Fraction(1, 3) * Fraction(3, 2) ** n <= mean
