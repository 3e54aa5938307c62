"""Shared fixtures: a reproducible corpus of small solvable instances.

Each corpus entry pairs a normalized instance with its objective and the
exact optimum, so approximation-ratio and dominance tests never have to
invent an expected value.
"""

import random

import pytest

from knapsub import (
    CoverageObjective,
    ModularObjective,
    SubmodularOracle,
    brute_force_opt,
    normalize,
)


def random_adjacency(n, p, rng):
    adj = [[] for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                adj[u].append(v)
                adj[v].append(u)
    return adj


def make_instance(idx):
    """Deterministic small instance number ``idx``.

    Even indices get a random-graph coverage objective, odd ones a modular
    objective, so both curved and linear behaviour show up in every sweep.
    """
    rng = random.Random(1000003 * idx + 17)
    n = rng.randint(4, 12)
    k = rng.choice([3, 4, 5, 6, 7, 8])
    costs = [rng.uniform(1.0, k) for _ in range(n)]
    if idx % 2 == 0:
        adj = random_adjacency(n, rng.uniform(0.15, 0.5), rng)
        objective = CoverageObjective(adj)
    else:
        objective = ModularObjective({i: rng.random() for i in range(n)})
    instance = normalize(list(enumerate(costs)), float(k))
    return instance, objective


class Corpus:
    """Lazy cache of (instance, objective, exact optimum) triples."""

    def __init__(self):
        self._cache = {}

    def __call__(self, idx):
        if idx not in self._cache:
            instance, objective = make_instance(idx)
            oracle = SubmodularOracle(instance, objective.value)
            opt = brute_force_opt(instance, oracle)
            self._cache[idx] = (instance, objective, opt)
        return self._cache[idx]


@pytest.fixture(scope="session")
def corpus():
    return Corpus()
