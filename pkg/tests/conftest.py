"""Shared fixtures: the random critical-set corpus and its cached solves.

The corpus is the common input for the round-trip, extremality, curvature,
and boundary suites; solving it once per session keeps the whole run inside
the runtime budget.
"""

import time

import numpy as np
import pytest

from maxblaschke.blaschke import CriticalSet
from maxblaschke.metrics import PolarGrid, pullback_density
from maxblaschke.solver import solve_maximal

CORPUS_SEED = 20250823
CORPUS_SIZE = 50


def random_critical_set(rng) -> CriticalSet:
    """Up to 8 points counted with multiplicity (each at most double),
    radii in [0.15, 0.7], with an origin point thrown in now and then."""
    entries = []
    total = 0
    target = int(rng.integers(1, 9))
    while total < target:
        mult = int(rng.integers(1, 3))
        if total + mult > target:
            mult = 1
        r = rng.uniform(0.15, 0.7)
        th = rng.uniform(0, 2 * np.pi)
        entries.append((r * np.exp(1j * th), mult))
        total += mult
    if rng.random() < 0.3:
        entries[0] = (0j, entries[0][1])
    return CriticalSet(tuple(entries))


@pytest.fixture(scope="session")
def corpus():
    rng = np.random.default_rng(CORPUS_SEED)
    return [random_critical_set(rng) for _ in range(CORPUS_SIZE)]


@pytest.fixture(scope="session")
def corpus_solves(corpus):
    """Per-entry (report, wall seconds); timing feeds the round-trip budget."""
    out = []
    for C in corpus:
        t0 = time.perf_counter()
        rep = solve_maximal(C)
        out.append((rep, time.perf_counter() - t0))
    return out


@pytest.fixture(scope="session")
def corpus_fields(corpus_solves):
    """Pullback densities of every corpus solve on the default grid."""
    grid = PolarGrid()
    fields = [pullback_density(rep.solution, grid) for rep, _ in corpus_solves]
    return grid, fields
