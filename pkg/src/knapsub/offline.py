"""Offline algorithms: density greedy and its augmented variants.

All three single-pass variants share one sweep: each iteration evaluates
f(G + e) for every still-fitting element, and both the best-gain item (the
augmentation candidate) and the best-density item (the greedy step) are read
off the same evaluations.  Plain greedy, greedy-or-max and greedy-plus-max
therefore issue exactly the same oracle queries; the stronger outputs are
free.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations

from .core import (
    AlgoReport,
    GreedyTrace,
    Instance,
    QueryLedger,
    Solution,
    SubmodularOracle,
    TraceStep,
)
from .errors import BudgetExceeded


@dataclass
class OfflineResult:
    """Report plus the per-prefix augmentation candidates that were compared."""

    report: AlgoReport
    augmentations: list[tuple[int, int | None, float]] = field(default_factory=list)


@dataclass
class _GreedyRun:
    prefix_ids: list[int]          # items in pick order
    prefix_costs: list[float]      # cost of G_0..G_m
    prefix_values: list[float]     # value of G_0..G_m
    candidates: list[tuple[int, int | None, float]]  # (i, best-gain id, f(G_i + s_i))
    trace: GreedyTrace


def _run_greedy(instance: Instance, oracle: SubmodularOracle, ledger: QueryLedger,
                seed_ids=(), restrict_to=None) -> _GreedyRun:
    """Density greedy from ``seed_ids``, harvesting augmentations and the trace.

    Ties in both argmaxes go to the smallest element id (strict comparison,
    candidates scanned in id order).  Elements that stop fitting the residual
    budget are physically dropped; their last known density still feeds the
    trace's ``ub_density`` field, which submodularity keeps an upper bound.
    ``restrict_to`` limits the candidate pool to a subset of element ids.
    """

    capacity = instance.capacity
    chosen = set(seed_ids)
    cost_g = instance.cost(chosen)
    value_g = oracle.evaluate(chosen, ledger)
    working = sorted(e.id for e in instance.elements
                     if e.id not in chosen and cost_g + e.cost <= capacity
                     and (restrict_to is None or e.id in restrict_to))

    prefix_ids: list[int] = []
    prefix_costs = [cost_g]
    prefix_values = [value_g]
    candidates: list[tuple[int, int | None, float]] = []
    steps: list[TraceStep] = []
    removed_max = 0.0
    i = 0

    while working:
        vals = {}
        dens = {}
        for eid in working:
            v = oracle.evaluate(chosen | {eid}, ledger)
            vals[eid] = v
            dens[eid] = max(0.0, v - value_g) / instance.cost_of(eid)
        best_gain = max(working, key=lambda e: (vals[e], -e))
        best_density = max(working, key=lambda e: (dens[e], -e))
        candidates.append((i, best_gain, vals[best_gain]))
        steps.append(TraceStep(cost_g, value_g, dens[best_density],
                               max(dens[best_density], removed_max)))

        chosen.add(best_density)
        cost_g += instance.cost_of(best_density)
        value_g = vals[best_density]
        prefix_ids.append(best_density)
        prefix_costs.append(cost_g)
        prefix_values.append(value_g)
        i += 1

        residual = capacity - cost_g
        kept = []
        for eid in working:
            if eid == best_density:
                continue
            if instance.cost_of(eid) > residual:
                removed_max = max(removed_max, dens[eid])
            else:
                kept.append(eid)
        working = kept

    steps.append(TraceStep(cost_g, value_g, 0.0, removed_max))
    # terminal prefix competes with an empty augmentation
    candidates.append((i, None, value_g))
    return _GreedyRun(prefix_ids, prefix_costs, prefix_values, candidates,
                      GreedyTrace(steps))


def _report(name, instance, ledger, start_queries, started, ids, value,
            trace=None) -> AlgoReport:
    ids = frozenset(ids)
    return AlgoReport(
        algorithm=name,
        solution=Solution(ids, value, instance.cost(ids)),
        queries=ledger.query_count - start_queries,
        wall_time=time.perf_counter() - started,
        trace=trace,
    )


def greedy(instance: Instance, oracle: SubmodularOracle,
           ledger: QueryLedger | None = None) -> OfflineResult:
    """Marginal-density greedy under the knapsack budget."""
    ledger = ledger or QueryLedger()
    started, q0 = time.perf_counter(), ledger.query_count
    run = _run_greedy(instance, oracle, ledger)
    report = _report("greedy", instance, ledger, q0, started,
                     run.prefix_ids, run.prefix_values[-1], run.trace)
    return OfflineResult(report)


def greedy_or_max(instance: Instance, oracle: SubmodularOracle,
                  ledger: QueryLedger | None = None) -> OfflineResult:
    """The better of plain greedy and the best feasible singleton."""
    ledger = ledger or QueryLedger()
    started, q0 = time.perf_counter(), ledger.query_count
    run = _run_greedy(instance, oracle, ledger)
    ids, value = run.prefix_ids, run.prefix_values[-1]
    augmentations = []
    if run.candidates and run.candidates[0][1] is not None:
        # the first sweep already evaluated every singleton
        s0, v0 = run.candidates[0][1], run.candidates[0][2]
        augmentations.append((0, s0, v0))
        if v0 > value:
            ids, value = [s0], v0
    report = _report("greedy_or_max", instance, ledger, q0, started,
                     ids, value, run.trace)
    return OfflineResult(report, augmentations)


def greedy_plus_max(instance: Instance, oracle: SubmodularOracle,
                    ledger: QueryLedger | None = None) -> OfflineResult:
    """Greedy where every prefix may be completed by its best single item.

    The output is the best of f(G_i + s_i) over all prefixes i, with s_i the
    top-gain item available at prefix i, plus the bare final greedy set.  The
    sweep that drives greedy already computed every f(G_i + e), so this
    dominates greedy and greedy-or-max at identical query cost.
    """
    ledger = ledger or QueryLedger()
    started, q0 = time.perf_counter(), ledger.query_count
    run = _run_greedy(instance, oracle, ledger)
    best_i, best_s, best_v = 0, None, -math.inf
    for i, s, v in run.candidates:
        if v > best_v:
            best_i, best_s, best_v = i, s, v
    ids = set(run.prefix_ids[:best_i])
    if best_s is not None:
        ids.add(best_s)
    report = _report("greedy_plus_max", instance, ledger, q0, started,
                     ids, best_v, run.trace)
    return OfflineResult(report, run.candidates)


def partial_enum_greedy(instance: Instance, oracle: SubmodularOracle, depth: int,
                        ledger: QueryLedger | None = None,
                        query_budget: int | None = None) -> OfflineResult:
    """Greedy completion of every feasible seed of at most ``depth`` items.

    depth 0 degenerates to plain greedy.  The seed enumeration costs roughly
    n^(depth+1) * k_tilde queries, so a budget may be supplied; it is checked
    upfront against that estimate and per seed while running.
    """
    if not 0 <= depth <= 3:
        raise ValueError("enumeration depth must be between 0 and 3")
    ledger = ledger or QueryLedger()
    started, q0 = time.perf_counter(), ledger.query_count

    n = instance.n
    ids = sorted(e.id for e in instance.elements)
    seeds = [()]
    for size in range(1, depth + 1):
        seeds.extend(c for c in combinations(ids, size)
                     if instance.cost(c) <= instance.capacity)
    if query_budget is not None:
        estimate = len(seeds) * (1 + n * max(1, instance.k_tilde))
        if estimate > query_budget:
            raise BudgetExceeded(
                f"seed enumeration needs about {estimate} queries, "
                f"budget is {query_budget}")

    best_ids: frozenset[int] = frozenset()
    best_v = -math.inf
    for seed in seeds:
        if query_budget is not None and ledger.query_count - q0 >= query_budget:
            raise BudgetExceeded("query budget exhausted during seed enumeration")
        run = _run_greedy(instance, oracle, ledger, seed_ids=seed)
        v = run.prefix_values[-1]
        if v > best_v:
            best_v = v
            best_ids = frozenset(seed) | set(run.prefix_ids)
    report = AlgoReport(
        algorithm="partial_enum_greedy",
        solution=Solution(best_ids, best_v, instance.cost(best_ids)),
        queries=ledger.query_count - q0,
        wall_time=time.perf_counter() - started,
    )
    return OfflineResult(report)
