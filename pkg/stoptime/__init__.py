"""Stopping-time analysis of the n-player Rock-Paper-Scissors elimination game.

``game_model`` defines one round, ``recurrence`` and ``markov_analysis``
compute the law of the stopping time exactly, ``asymptotics`` bounds its
growth, ``simulator`` checks everything by seeded Monte Carlo, and
``verification`` bundles the exact invariants.
"""
