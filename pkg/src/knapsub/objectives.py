"""Objective functions and their cost rules.

All objectives are monotone and submodular on feasible sets, evaluate
deterministically on frozensets of ids, and keep no mutable state, so a
single objective may back many concurrent runs.
"""

from __future__ import annotations

import numpy as np


class CoverageObjective:
    """Fraction of vertices dominated by the chosen set.

    f(Z) = |Z union N(Z)| / |V| on an undirected graph.  Neighborhoods are
    precomputed as integer bitmasks, so one evaluation is |Z| bitwise ors and
    a popcount.
    """

    def __init__(self, adjacency):
        """``adjacency`` maps vertex id (0..n-1) to an iterable of neighbors.
        Edges must come symmetric; self-loops are ignored."""
        self.n_vertices = len(adjacency)
        masks = []
        for v in range(self.n_vertices):
            m = 1 << v
            for u in adjacency[v]:
                if u == v:
                    continue
                if not 0 <= u < self.n_vertices:
                    raise ValueError(f"vertex {u} out of range")
                m |= 1 << u
            masks.append(m)
        for v in range(self.n_vertices):
            for u in adjacency[v]:
                if u != v and not masks[u] >> v & 1:
                    raise ValueError(f"edge {v}-{u} is not symmetric")
        self._masks = masks

    def value(self, ids) -> float:
        covered = 0
        for v in ids:
            covered |= self._masks[v]
        return covered.bit_count() / self.n_vertices

    def degree(self, v: int) -> int:
        return self._masks[v].bit_count() - 1


def coverage_costs(adjacency, alpha: float = 1 / 20) -> dict[int, float]:
    """Degree-proportional vertex costs, rescaled so the minimum is exactly 1.

    Raw cost of v is (deg(v) - alpha) / |V|.  Vertices of degree zero are
    assigned the minimum cost directly so the rule stays positive.
    """

    n = len(adjacency)
    degs = {v: len({u for u in adjacency[v] if u != v}) for v in range(n)}
    raw = {v: (d - alpha) / n for v, d in degs.items() if d >= 1}
    if not raw:
        return {v: 1.0 for v in range(n)}
    unit = min(raw.values())
    return {v: (raw[v] / unit if v in raw else 1.0) for v in range(n)}


class ModularObjective:
    """Additive objective: f(S) is the sum of fixed per-id weights."""

    def __init__(self, weights: dict[int, float]):
        if any(w < 0 for w in weights.values()):
            raise ValueError("weights must be non-negative")
        self.weights = dict(weights)

    def value(self, ids) -> float:
        return float(sum(self.weights[i] for i in ids))


class MovieObjective:
    """Recommendation utility over mean-centered rating vectors.

    For target movies X, f(Z) = sum over x in X of
    max(0, max over z in Z of <v_z, v_x>).  The inner products are cached in
    a read-only table at construction; the clamp at zero keeps the function
    monotone.  An empty Z scores 0.
    """

    def __init__(self, vectors: np.ndarray, targets=None):
        """``vectors`` holds one mean-centered row per movie."""
        vectors = np.asarray(vectors, dtype=float)
        sim = vectors @ vectors.T
        self.n_movies = vectors.shape[0]
        if targets is None:
            targets = range(self.n_movies)
        self._table = sim[:, list(targets)]

    def value(self, ids) -> float:
        if not ids:
            return 0.0
        best = self._table[list(ids)].max(axis=0)
        return float(np.maximum(best, 0.0).sum())

    def singleton_values(self) -> np.ndarray:
        return np.maximum(self._table, 0.0).sum(axis=1)


def movie_costs(objective: MovieObjective, gamma: float | None = None) -> dict[int, float]:
    """Costs proportional to each movie's singleton value, minimum exactly 1.

    With ``gamma`` unset the scale is 1 over the smallest positive singleton
    value.  Movies whose singleton value is 0 get the minimum cost 1.
    """

    singles = objective.singleton_values()
    positive = singles[singles > 0]
    if gamma is not None:
        return {x: (float(gamma * s) if s > 0 else 1.0)
                for x, s in enumerate(singles)}
    unit = float(positive.min()) if positive.size else 1.0
    # division keeps the cheapest positive cost at exactly 1.0
    return {x: (float(s) / unit if s > 0 else 1.0)
            for x, s in enumerate(singles)}


class HiddenPairObjective:
    """Worst-case objective hiding one valuable pair among look-alike sets.

    Every nonempty set scores 1/2 except the hidden pair itself, which
    scores 1.  The monotone variant also maps every set of more than two
    elements to 1, which restores monotonicity off the feasible region.
    Paired with per-element cost capacity/2, any algorithm that never
    evaluates the hidden pair cannot beat 1/2.
    """

    def __init__(self, n: int, pair: tuple[int, int] | None = None,
                 monotone: bool = False):
        self.n = n
        self.pair = frozenset(pair) if pair is not None else None
        if self.pair is not None and len(self.pair) != 2:
            raise ValueError("pair must contain two distinct ids")
        self.monotone = monotone

    def value(self, ids) -> float:
        ids = frozenset(ids)
        if not ids:
            return 0.0
        if self.monotone and len(ids) > 2:
            return 1.0
        if self.pair is not None and ids == self.pair:
            return 1.0
        return 0.5

    def elements(self, capacity: float):
        """The matching ground set: every id priced at capacity/2."""
        return [(i, capacity / 2.0) for i in range(self.n)]
