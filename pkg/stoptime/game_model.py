"""One round of n-player Rock-Paper-Scissors as a Markov transition.

A round is decisive when exactly two distinct gestures are shown; the
players showing the winning gesture survive. With one or three distinct
gestures nobody is eliminated. For i players this gives

    p(i, j) = C(i, j) / 3^(i-1)                      for 1 <= j < i
    p(i, i) = 1 - 2 (2/3)^(i-1) (1 - 1/2^(i-1))
    p(i, j) = 0                                      for j > i

with state 1 absorbing (p(1, 1) = 1).
"""

import itertools
import math
from collections import Counter
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List

from exactmath import LowerTriangularMatrix
from models.stoptime import TruncatedChain

SurvivalFn = Callable[[int, int], Fraction]


class Gesture(IntEnum):
    ROCK = 0
    PAPER = 1
    SCISSORS = 2

    def beats(self, other: "Gesture") -> bool:
        # Paper > Rock, Scissors > Paper, Rock > Scissors
        return (self - other) % 3 == 1


def survivors(gestures: Iterable[int]) -> int:
    """Number of players still in the game after a round with ``gestures``."""
    gestures = [Gesture(g) for g in gestures]
    shown = set(gestures)
    if len(shown) != 2:
        return len(gestures)
    a, b = shown
    winner = a if a.beats(b) else b
    return sum(1 for g in gestures if g == winner)


def _check_count(name: str, value: int):
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")


def survival_probability(i: int, j: int) -> Fraction:
    """p(i, j): probability that j of i players survive one round."""
    _check_count("i", i)
    _check_count("j", j)
    if j > i:
        return Fraction(0)
    if i == 1:
        return Fraction(1)
    if j < i:
        return Fraction(math.comb(i, j), 3 ** (i - 1))
    return 1 - 2 * Fraction(2, 3) ** (i - 1) * (1 - Fraction(1, 2 ** (i - 1)))


def decisive_probability(i: int) -> Fraction:
    """1 - p(i, i) in its reduced form (2^i - 2) / 3^(i-1)."""
    _check_count("i", i)
    return Fraction(2 ** i - 2, 3 ** (i - 1))


def transition_row(i: int, probability: SurvivalFn = survival_probability) -> List[Fraction]:
    """[p(i, 1), ..., p(i, i)]."""
    _check_count("i", i)
    return [probability(i, j) for j in range(1, i + 1)]


def build_truncated_chain(n: int, probability: SurvivalFn = survival_probability) -> TruncatedChain:
    """(P_n, psi_n) over the transient states 2..n.

    ``probability`` is injectable so the verification suite can audit a
    tampered model; everything else uses the cached default.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if probability is survival_probability:
        return _default_chain(n)
    return _chain(n, probability)


@lru_cache(maxsize=256)
def _default_chain(n: int) -> TruncatedChain:
    return _chain(n, survival_probability)


def _chain(n: int, probability: SurvivalFn) -> TruncatedChain:
    states = range(2, n + 1)
    matrix = LowerTriangularMatrix([
        [probability(i, j) if j <= i else 0 for j in states] for i in states
    ])
    psi = tuple(probability(j, 1) for j in states)
    return TruncatedChain(n=n, matrix=matrix, psi=psi)


def survivor_distribution_by_enumeration(i: int) -> Dict[int, Fraction]:
    """Exact survivor law of one round by walking all 3^i gesture profiles."""
    _check_count("i", i)
    counts = Counter(survivors(profile) for profile in itertools.product(Gesture, repeat=i))
    total = 3 ** i
    return {j: Fraction(counts.get(j, 0), total) for j in range(1, i + 1)}
