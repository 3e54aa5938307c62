"""Core types and operations: instances, query accounting, exact baselines.

Every algorithm in this package talks to the objective through a
:class:`SubmodularOracle`, which counts queries on a :class:`QueryLedger`
and, when enforcement is on, refuses to evaluate sets that do not fit the
knapsack.  Costs are normalized so the cheapest purchasable element costs
exactly 1, which makes ``floor(capacity)`` an upper bound on solution size.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field

from .errors import (
    BudgetExceeded,
    EmptyInstanceWarning,
    InfeasibleQuery,
    TooLarge,
)

# exact search is capped at this many elements (2^22 subsets)
BRUTE_FORCE_LIMIT = 22


@dataclass(frozen=True)
class Element:
    """One purchasable item: an integer id and a positive cost."""

    id: int
    cost: float


@dataclass(frozen=True)
class Solution:
    """A feasible answer: chosen element ids, oracle value, and total cost.

    ``ids`` never includes base-set members; the base set is implicitly part
    of every evaluation.
    """

    ids: frozenset[int]
    value: float
    cost: float


class Instance:
    """A normalized ground set with a knapsack capacity.

    Attributes
    ----------
    elements : tuple of Element, in construction order (stream order)
    capacity : rescaled knapsack budget K
    base_set : ids of zero-cost items, absorbed into every evaluation
    k_tilde  : min(len(elements), floor(capacity)), a solution-size bound
    """

    def __init__(self, elements, capacity, base_set=()):
        self.elements = tuple(elements)
        self.capacity = float(capacity)
        self.base_set = frozenset(base_set)
        self._cost = {e.id: e.cost for e in self.elements}
        if len(self._cost) != len(self.elements):
            raise ValueError("duplicate element ids")
        if self.base_set & self._cost.keys():
            raise ValueError("base_set must be disjoint from elements")
        for e in self.elements:
            if not math.isfinite(e.cost) or e.cost <= 0:
                raise ValueError(f"element {e.id} must have finite positive "
                                 "cost (zero-cost items belong in base_set)")
            if e.cost > self.capacity:
                raise ValueError(f"element {e.id} does not fit the capacity")
        # an infinite capacity never binds, so the cardinality cap is just n
        self.k_tilde = (len(self.elements) if math.isinf(self.capacity)
                        else min(len(self.elements), math.floor(self.capacity)))

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def empty(self) -> bool:
        return not self.elements and not self.base_set

    def element_ids(self):
        return [e.id for e in self.elements]

    def cost_of(self, eid: int) -> float:
        if eid in self.base_set:
            return 0.0
        return self._cost[eid]

    def cost(self, ids) -> float:
        return sum(self.cost_of(i) for i in ids)

    def fits(self, ids) -> bool:
        return self.cost(ids) <= self.capacity

    def __repr__(self):
        return (f"Instance(n={self.n}, capacity={self.capacity:g}, "
                f"k_tilde={self.k_tilde}, base={len(self.base_set)})")


class QueryLedger:
    """Thread-safe counter of oracle evaluations.

    With ``enforce_feasible`` on (the default), evaluating a set whose cost
    exceeds the capacity raises :class:`InfeasibleQuery` and counts nothing.
    With enforcement off the query is answered but tallied in
    ``infeasible_query_count`` for observability.  An optional ``budget``
    turns the ledger into a hard stop: a query that would push the count past
    the budget raises :class:`BudgetExceeded` before being evaluated.
    """

    def __init__(self, enforce_feasible: bool = True, budget: int | None = None):
        self.enforce_feasible = enforce_feasible
        self.budget = budget
        self.query_count = 0
        self.infeasible_query_count = 0
        self._lock = threading.Lock()

    def _admit(self, infeasible: bool):
        with self._lock:
            if self.budget is not None and self.query_count + 1 > self.budget:
                raise BudgetExceeded(
                    f"query budget of {self.budget} oracle calls exhausted")
            self.query_count += 1
            if infeasible:
                self.infeasible_query_count += 1

    def snapshot(self) -> int:
        return self.query_count


class SubmodularOracle:
    """Query-counted access to a set function on an instance.

    ``fn`` is either a callable on frozensets of ids or an object with a
    ``value(ids)`` method.  The base set is unioned into every evaluation, so
    base members contribute nothing as marginals.
    """

    def __init__(self, instance: Instance, fn):
        self.instance = instance
        self._fn = fn.value if hasattr(fn, "value") else fn

    def evaluate(self, ids, ledger: QueryLedger) -> float:
        ids = frozenset(ids)
        infeasible = self.instance.cost(ids) > self.instance.capacity
        if infeasible and ledger.enforce_feasible:
            raise InfeasibleQuery(
                f"set of cost {self.instance.cost(ids):g} exceeds capacity "
                f"{self.instance.capacity:g}")
        ledger._admit(infeasible)
        return float(self._fn(ids | self.instance.base_set))

    def marginal_gain(self, eid: int, base_ids, ledger: QueryLedger,
                      cached: float | None = None) -> float:
        """f(base + e) - f(base), spending one query when f(base) is cached."""
        base_ids = frozenset(base_ids)
        if cached is None:
            cached = self.evaluate(base_ids, ledger)
        return self.evaluate(base_ids | {eid}, ledger) - cached

    def marginal_density(self, eid: int, base_ids, ledger: QueryLedger,
                         cached: float | None = None) -> float:
        """Marginal gain per unit cost.  Base members have density 0."""
        cost = self.instance.cost_of(eid)
        if cost == 0.0:
            return 0.0
        return self.marginal_gain(eid, base_ids, ledger, cached) / cost


@dataclass(frozen=True)
class TraceStep:
    """One prefix of a greedy or thresholding run.

    ``cum_cost`` and ``value`` describe the prefix itself; ``next_density``
    is the marginal density of the item taken next (0 at the terminal step);
    ``ub_density`` upper-bounds the marginal density of every element outside
    the prefix, using the last known density of items already discarded.
    """

    cum_cost: float
    value: float
    next_density: float
    ub_density: float = 0.0


@dataclass
class GreedyTrace:
    """Piecewise-linear performance curve of an incremental run.

    The curve passes through (cum_cost, value) of each step and climbs with
    slope ``next_density`` until the next step.
    """

    steps: list[TraceStep] = field(default_factory=list)

    def breakpoints(self):
        return [s.cum_cost for s in self.steps]

    def value_at(self, x: float) -> float:
        steps = self.steps
        if not steps or x < steps[0].cum_cost:
            return 0.0
        for i in range(len(steps) - 1):
            if x < steps[i + 1].cum_cost:
                s = steps[i]
                return s.value + (x - s.cum_cost) * s.next_density
        last = steps[-1]
        return last.value + (x - last.cum_cost) * last.next_density

    def right_derivative_at(self, x: float) -> float:
        steps = self.steps
        if not steps or x < steps[0].cum_cost:
            return 0.0
        for i in range(len(steps) - 1):
            if x < steps[i + 1].cum_cost:
                return steps[i].next_density
        return steps[-1].next_density

    def validate(self, offline: bool = False):
        """Assert the structural trace invariants."""
        prev = None
        for s in self.steps:
            assert s.next_density >= 0.0 and s.ub_density >= 0.0
            if prev is not None:
                assert s.cum_cost > prev.cum_cost
                assert s.value >= prev.value - 1e-12
                if offline:
                    assert s.next_density <= prev.next_density + 1e-12
            prev = s


@dataclass
class AlgoReport:
    """Uniform result record produced by every algorithm."""

    algorithm: str
    solution: Solution
    queries: int
    passes: int = 0
    rounds: int = 0
    max_central_receipts: int = 0
    wall_time: float = 0.0
    trace: GreedyTrace | None = None


def normalize(raw_elements, capacity, base_ids=()) -> Instance:
    """Rescale costs so the cheapest positive cost is exactly 1.

    Zero-cost items move into the base set, items costlier than the rescaled
    capacity are dropped, and the capacity is divided by the same factor.
    Normalizing an already-normalized instance changes nothing.  An instance
    with no purchasable elements and no base set is returned as-is but
    flagged with :class:`EmptyInstanceWarning`.
    """

    elems = []
    base = set(base_ids)
    for item in raw_elements:
        e = item if isinstance(item, Element) else Element(int(item[0]), float(item[1]))
        if e.cost < 0:
            raise ValueError(f"negative cost on element {e.id}")
        if e.cost == 0.0:
            base.add(e.id)
        else:
            elems.append(e)

    if elems:
        unit = min(e.cost for e in elems)
        capacity = capacity / unit
        elems = [Element(e.id, e.cost / unit) for e in elems]
    elems = [e for e in elems if e.cost <= capacity]

    inst = Instance(elems, capacity, base)
    if inst.empty:
        warnings.warn("normalization produced an empty instance",
                      EmptyInstanceWarning, stacklevel=2)
    return inst


def brute_force_opt(instance: Instance, oracle: SubmodularOracle) -> Solution:
    """Exact optimum by subset enumeration, guarded at 22 elements.

    Ties in value resolve to the lexicographically smallest sorted id tuple,
    so the result is deterministic across enumeration orders.
    """

    n = instance.n
    if n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{n} elements exceed the exact-search limit of "
                       f"{BRUTE_FORCE_LIMIT}")
    ledger = QueryLedger(enforce_feasible=True)
    order = sorted(instance.elements, key=lambda e: e.id)
    ids = [e.id for e in order]
    costs = [e.cost for e in order]

    # subset costs share structure: cost(mask) = cost(mask minus low bit) + that bit
    cum = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        cum[mask] = cum[mask ^ low] + costs[low.bit_length() - 1]

    best_value = oracle.evaluate((), ledger)
    best_ids: tuple[int, ...] = ()
    for mask in range(1, 1 << n):
        if cum[mask] > instance.capacity:
            continue
        subset = frozenset(ids[i] for i in range(n) if mask >> i & 1)
        v = oracle.evaluate(subset, ledger)
        if v > best_value:
            best_value, best_ids = v, tuple(sorted(subset))
        elif v == best_value:
            key = tuple(sorted(subset))
            if best_ids and (not key or key < best_ids):
                best_ids = key
    chosen = frozenset(best_ids)
    return Solution(chosen, best_value, instance.cost(chosen))


def upper_bound_opt(instance: Instance, oracle: SubmodularOracle,
                    trace: GreedyTrace) -> float:
    """Certified upper bound on the optimum from one full greedy trace.

    Takes the minimum of the whole-ground-set value and, over every greedy
    prefix, prefix value plus capacity times the prefix's density bound.
    Monotonicity gives the first term; submodularity makes each recorded
    ``ub_density`` dominate the true marginal density of all outside
    elements, which bounds what the optimum can still add.  The ground-set
    evaluation may exceed the capacity, so it runs on a non-enforcing side
    ledger; no extra greedy passes are needed.
    """

    side = QueryLedger(enforce_feasible=False)
    bound = oracle.evaluate(instance.element_ids(), side)
    for s in trace.steps:
        bound = min(bound, s.value + instance.capacity * s.ub_density)
    return bound
