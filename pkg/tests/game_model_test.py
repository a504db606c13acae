"""Round law and truncated chain.

Run from the repository root:

    python tests/game_model_test.py
"""

import os
import sys
from fractions import Fraction as F

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from exactmath import LowerTriangularMatrix
from stoptime.game_model import (
    Gesture,
    build_truncated_chain,
    decisive_probability,
    survival_probability,
    survivor_distribution_by_enumeration,
    survivors,
    transition_row,
)


def test_survival_probability_values():
    assert survival_probability(2, 1) == F(2, 3)
    assert survival_probability(4, 4) == F(13, 27)
    assert survival_probability(3, 5) == 0
    assert survival_probability(1, 1) == 1


def test_nonpositive_arguments():
    for args in ((0, 1), (2, 0), (-1, -1)):
        try:
            survival_probability(*args)
        except ValueError:
            continue
        raise AssertionError(f"{args} was accepted")


def test_transition_rows():
    assert transition_row(1) == [1]
    assert transition_row(3) == [F(1, 3)] * 3
    assert transition_row(4) == [F(4, 27), F(2, 9), F(4, 27), F(13, 27)]
    for i in range(1, 41):
        assert sum(transition_row(i)) == 1, f"row {i}"


def test_diagonal_closed_form():
    for i in range(2, 41):
        stay = survival_probability(i, i)
        assert 0 < stay < 1
        assert 1 - stay == decisive_probability(i)


def test_round_rule():
    r, p, s = Gesture.ROCK, Gesture.PAPER, Gesture.SCISSORS
    assert p.beats(r) and s.beats(p) and r.beats(s)
    assert not r.beats(p)
    assert survivors([r, r, r]) == 3
    assert survivors([r, p]) == 1
    assert survivors([r, p, s, s]) == 4
    assert survivors([r, s, s, r, r]) == 3


def test_enumeration_matches_round_law():
    for n in range(1, 7):
        exact = survivor_distribution_by_enumeration(n)
        for j in range(1, n + 1):
            assert exact[j] == survival_probability(n, j), f"p({n},{j})"


def test_small_chains():
    chain = build_truncated_chain(2)
    assert chain.matrix == LowerTriangularMatrix([[F(1, 3)]])
    assert chain.psi == (F(2, 3),)

    chain = build_truncated_chain(3)
    assert chain.matrix == LowerTriangularMatrix([[F(1, 3), 0], [F(1, 3), F(1, 3)]])
    assert chain.psi == (F(2, 3), F(1, 3))

    chain = build_truncated_chain(4)
    assert chain.matrix.row(2) == (F(2, 9), F(4, 27), F(13, 27))
    assert chain.psi == (F(2, 3), F(1, 3), F(4, 27))
    assert chain.entry(4, 4) == F(13, 27)
    assert chain.psi_at(4) == F(4, 27)
    assert chain.index_of(2) == 0
    assert chain.at_initial_state(list(chain.psi)) == F(4, 27)


def test_chain_rows_and_nesting():
    big = build_truncated_chain(12)
    for i in range(2, 13):
        row = sum((big.entry(i, j) for j in range(2, i + 1)), F(0))
        assert row == 1 - big.psi_at(i)
    for m in range(2, 12):
        small = build_truncated_chain(m)
        for i in range(2, m + 1):
            for j in range(2, m + 1):
                assert small.entry(i, j) == big.entry(i, j)


def test_injected_law():
    def tampered(i, j):
        if (i, j) == (4, 4):
            return F(1, 2)
        return survival_probability(i, j)

    chain = build_truncated_chain(4, tampered)
    assert chain.entry(4, 4) == F(1, 2)
    assert build_truncated_chain(4).entry(4, 4) == F(13, 27)


def test_chain_rejects_one_player():
    try:
        build_truncated_chain(1)
    except ValueError:
        pass
    else:
        raise AssertionError("n = 1 was accepted")


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
