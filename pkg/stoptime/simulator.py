"""Seeded Monte Carlo play of the game, used to validate the exact results.

Trials are cut into fixed-size blocks. Block ``b`` draws from its own
Philox stream keyed by ``SeedSequence(seed, spawn_key=(b,))``, so a block's
outcomes depend only on (seed, b) and never on which worker ran it or in
what order. Blocks are tallied into integer histograms and merged in block
order; mean and variance come from exact integer sums, which makes
reports bit-identical for any thread count.
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from models.stoptime import GoodnessOfFit, SimulationReport
from settings import Settings, load_settings
from stoptime.game_model import Gesture, survivors
from stoptime.markov_analysis import pmf_table

logger = logging.getLogger(__name__)

RNG_NAME = "numpy-philox4x64/seedsequence-spawn-key"
ROUND_CAP = 10 ** 7
MIN_EXPECTED = 5.0


class SimulationError(RuntimeError):
    pass


def _check_players(players: int):
    if players < 2:
        raise ValueError(f"A round needs at least 2 players, got {players}")


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent generator for trial block ``block`` of a run seeded with ``seed``."""
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


# ----------------------------------------------------------------------
# Single games
# ----------------------------------------------------------------------
def play_round(players: int, rng: np.random.Generator) -> int:
    """Every player shows a uniform gesture; return how many survive."""
    _check_players(players)
    return survivors(rng.integers(0, 3, size=players))


def simulate_game(n: int, rng: np.random.Generator, round_cap: int = ROUND_CAP) -> int:
    """Rounds played until a single winner remains."""
    _check_players(n)
    players, rounds = n, 0
    while players > 1:
        if rounds >= round_cap:
            raise SimulationError(f"Game with n={n} did not finish within {round_cap} rounds")
        players = play_round(players, rng)
        rounds += 1
    return rounds


# ----------------------------------------------------------------------
# Vectorised rounds
# ----------------------------------------------------------------------
def _round_survivors(gestures: np.ndarray, players: np.ndarray) -> np.ndarray:
    """Row-wise survivors; columns at or past ``players[row]`` are ignored."""
    valid = np.arange(gestures.shape[1]) < players[:, None]
    rock, paper, scissors = (((gestures == g) & valid).sum(axis=1) for g in Gesture)
    distinct = (rock > 0).astype(np.int64) + (paper > 0) + (scissors > 0)
    # rock+paper -> paper wins, paper+scissors -> scissors, rock+scissors -> rock
    winners = np.where(scissors == 0, paper, np.where(rock == 0, scissors, rock))
    return np.where(distinct == 2, winners, players)


def simulate_rounds(players: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Survivor counts of ``trials`` independent rounds with ``players`` each."""
    _check_players(players)
    if trials < 1:
        raise ValueError("trials must be positive")
    gestures = rng.integers(0, 3, size=(trials, players), dtype=np.int8)
    return _round_survivors(gestures, np.full(trials, players, dtype=np.int64))


def _simulate_block(n: int, size: int, rng: np.random.Generator,
                    round_cap: int = ROUND_CAP) -> np.ndarray:
    """Stopping times of ``size`` independent games."""
    players = np.full(size, n, dtype=np.int64)
    rounds = np.zeros(size, dtype=np.int64)
    active = np.arange(size)
    played = 0
    while active.size:
        if played >= round_cap:
            logger.warning("Round cap %d hit with %d games unfinished", round_cap, active.size)
            raise SimulationError(f"{active.size} games with n={n} did not finish "
                                  f"within {round_cap} rounds")
        current = players[active]
        gestures = rng.integers(0, 3, size=(active.size, int(current.max())), dtype=np.int8)
        players[active] = _round_survivors(gestures, current)
        rounds[active] += 1
        active = active[players[active] > 1]
        played += 1
    return rounds


# ----------------------------------------------------------------------
# Estimation
# ----------------------------------------------------------------------
def _block_sizes(trials: int, block_size: int) -> List[int]:
    full, rest = divmod(trials, block_size)
    return [block_size] * full + ([rest] if rest else [])


def estimate(n: int, trials: int, seed: int, settings: Optional[Settings] = None) -> SimulationReport:
    """Empirical stopping-time statistics from ``trials`` seeded games."""
    _check_players(n)
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    settings = settings or load_settings()

    sizes = _block_sizes(trials, settings.block_size)
    workers = min(settings.worker_count(), len(sizes))
    logger.info("Simulating n=%d: %d trials in %d blocks on %d threads",
                n, trials, len(sizes), workers)

    def run_block(block: int) -> np.ndarray:
        return np.bincount(_simulate_block(n, sizes[block], block_rng(seed, block)))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        tallies = list(pool.map(run_block, range(len(sizes))))

    histogram: Counter = Counter()
    for tally in tallies:
        for k in np.flatnonzero(tally):
            histogram[int(k)] += int(tally[k])

    total = sum(k * c for k, c in histogram.items())
    total_sq = sum(k * k * c for k, c in histogram.items())
    mean = Fraction(total, trials)
    if trials > 1:
        var = (total_sq - Fraction(total * total, trials)) / (trials - 1)
    else:
        var = Fraction(0)

    return SimulationReport(
        n=n,
        trials=trials,
        seed=seed,
        rng=RNG_NAME,
        block_size=settings.block_size,
        mean=float(mean),
        variance=float(var),
        std_error=float(np.sqrt(float(var) / trials)),
        histogram=dict(sorted(histogram.items())),
        max_k_observed=max(histogram),
    )


def _pool_bins(observed: List[float], expected: List[float]) -> Tuple[List[float], List[float]]:
    """Merge adjacent bins left to right until each expects MIN_EXPECTED."""
    pooled_obs: List[float] = []
    pooled_exp: List[float] = []
    acc_obs = acc_exp = 0.0
    for o, e in zip(observed, expected):
        acc_obs += o
        acc_exp += e
        if acc_exp >= MIN_EXPECTED:
            pooled_obs.append(acc_obs)
            pooled_exp.append(acc_exp)
            acc_obs = acc_exp = 0.0
    if acc_exp > 0 or acc_obs > 0:
        if pooled_exp:
            pooled_obs[-1] += acc_obs
            pooled_exp[-1] += acc_exp
        else:
            pooled_obs.append(acc_obs)
            pooled_exp.append(acc_exp)
    return pooled_obs, pooled_exp


def chi_square_fit(report: SimulationReport) -> GoodnessOfFit:
    """Pearson chi-square of the stopping-time histogram against the exact law.

    The last bin also carries the exact tail mass beyond the longest
    observed game.
    """
    table = pmf_table(report.n, k_max=report.max_k_observed)
    probs = [float(p) for p in table.probs]
    probs[-1] += float(table.tail_mass)

    observed = [float(report.histogram.get(k, 0)) for k in range(1, table.k_max + 1)]
    expected = [report.trials * p for p in probs]
    obs, exp_counts = _pool_bins(observed, expected)
    if len(obs) < 2:
        return GoodnessOfFit(statistic=0.0, p_value=1.0, bins=len(obs))

    exp_arr = np.array(exp_counts)
    exp_arr *= report.trials / exp_arr.sum()
    statistic, p_value = stats.chisquare(np.array(obs), exp_arr)
    return GoodnessOfFit(statistic=float(statistic), p_value=float(p_value), bins=len(obs))


def survivor_histogram(players: int, trials: int, seed: int) -> Dict[int, int]:
    """One-round survivor counts from a seeded run of ``trials`` rounds."""
    outcomes = simulate_rounds(players, trials, block_rng(seed, 0))
    counts = np.bincount(outcomes, minlength=players + 1)
    return {j: int(counts[j]) for j in range(1, players + 1)}
