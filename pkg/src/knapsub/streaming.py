"""Multi-pass streaming algorithms built on descending density thresholds.

The thresholding stage walks a geometric grid of density thresholds from
lam/(alpha*K) down to lam/(2K), taking one pass per executed level and
collecting any element whose marginal density strictly clears the level
while still fitting the budget.  Because marginal densities only shrink as
the collected set grows, the largest density recorded during a pass is a
certificate that every level above it would collect nothing; such levels
are skipped without touching the stream.  Skipping never changes the
collected set, it only avoids provably idle traversals.
"""

from __future__ import annotations

import bisect
import math
import time
from dataclasses import dataclass

from .core import (
    AlgoReport,
    Element,
    GreedyTrace,
    Instance,
    QueryLedger,
    Solution,
    SubmodularOracle,
    TraceStep,
)
from .errors import InvalidLambda, ParseError
from .offline import _run_greedy


class StreamSource:
    """Replayable element sequence; every traversal bumps ``pass_count``."""

    def __init__(self, elements):
        self._elements = [e if isinstance(e, Element) else Element(int(e[0]), float(e[1]))
                          for e in elements]
        self.pass_count = 0

    @classmethod
    def from_instance(cls, instance: Instance) -> "StreamSource":
        return cls(instance.elements)

    @classmethod
    def from_file(cls, path) -> "StreamSource":
        """One element per line: ``id<TAB>cost``.  Blank lines are skipped."""
        out = []
        with open(path) as fh:
            for no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ParseError("expected id<TAB>cost", line_no=no)
                try:
                    out.append(Element(int(parts[0]), float(parts[1])))
                except ValueError as exc:
                    raise ParseError(str(exc), line_no=no) from None
        return cls(out)

    def align_to(self, instance: Instance) -> "StreamSource":
        """Drop items the (normalized) instance no longer carries."""
        known = {e.id for e in instance.elements}
        return StreamSource([Element(e.id, instance.cost_of(e.id))
                             for e in self._elements if e.id in known])

    def scan(self):
        self.pass_count += 1
        yield from self._elements

    def __len__(self):
        return len(self._elements)


def threshold_levels(lam: float, alpha: float, epsilon: float, k: float):
    """Geometric threshold grid, highest first: lam/(alpha*k) shrinking by
    (1+epsilon) while still above lam/(2k)."""
    if lam <= 0:
        raise InvalidLambda(f"value estimate must be positive, got {lam!r}")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    levels = []
    tau = lam / (alpha * k)
    floor = lam / (2.0 * k)
    while tau > floor:
        levels.append(tau)
        tau /= 1.0 + epsilon
    return levels


@dataclass(frozen=True)
class ThresholdSchedule:
    """The descending threshold grid for one thresholding run."""

    lam: float
    alpha: float
    epsilon: float
    capacity: float

    def levels(self):
        return threshold_levels(self.lam, self.alpha, self.epsilon, self.capacity)


@dataclass
class SieveState:
    """Collected set in insertion order plus its prefix costs and values."""

    order: list[int]
    prefix_costs: list[float]
    prefix_values: list[float]
    trace: GreedyTrace
    passes: int
    best_singleton: tuple[float, int] | None = None

    @property
    def value(self) -> float:
        return self.prefix_values[-1]


@dataclass
class OptEstimate:
    """Result of the single-pass value estimator.

    Unpacks as ``(lam, alpha)``; the remaining fields are diagnostics used
    to seed later stages (the exact max singleton density) and to audit the
    space bound (peak retained element count across parallel sieves).
    """

    lam: float
    alpha: float
    max_singleton_density: float = 0.0
    peak_retained: int = 0
    best_singleton: tuple[float, int] | None = None

    def __iter__(self):
        return iter((self.lam, self.alpha))


def _collect(stream, k, oracle, levels, ledger, density_cap, track_singletons):
    """Run the thresholding stage.  Returns the sieve state.

    ``density_cap``, when given, must upper-bound every element's current
    marginal density (the estimator's exact singleton-density max serves);
    levels at or above the cap are skipped unexecuted.  During the first
    executed pass singleton values come for free while the set is empty and
    cost one extra query afterwards, which sieve_or_max uses.
    """
    inst = oracle.instance
    value_empty = oracle.evaluate((), ledger)
    order: list[int] = []
    member = set()
    cost_t = 0.0
    value_t = value_empty
    prefix_costs = [0.0]
    prefix_values = [value_empty]
    steps: list[TraceStep] = []
    cap = math.inf if density_cap is None else density_cap
    best_single = None
    singles_pending = track_singletons
    executed = 0

    for tau in levels:
        if tau >= cap:
            continue  # certificate: no remaining density clears this level
        executed += 1
        track = singles_pending
        seen = 0.0
        for elem in stream.scan():
            eid = elem.id
            if eid in member:
                continue
            c_e = inst.cost_of(eid)
            single_v = None
            if cost_t + c_e <= k:
                gain = oracle.marginal_gain(eid, member, ledger, cached=value_t)
                if not member:
                    single_v = value_empty + gain
                density = max(0.0, gain) / c_e
                if density > tau:
                    steps.append(TraceStep(cost_t, value_t, density))
                    order.append(eid)
                    member.add(eid)
                    cost_t += c_e
                    value_t += gain
                    prefix_costs.append(cost_t)
                    prefix_values.append(value_t)
                else:
                    seen = max(seen, density)
            if track:
                if single_v is None and c_e <= k:
                    single_v = oracle.evaluate((eid,), ledger)
                if single_v is not None and (best_single is None or single_v > best_single[0]):
                    best_single = (single_v, eid)
        singles_pending = singles_pending and not track
        cap = seen

    if track_singletons and singles_pending:
        # every level was skipped; spend one dedicated singleton pass
        for elem in stream.scan():
            if inst.cost_of(elem.id) > k:
                continue
            v = oracle.evaluate((elem.id,), ledger)
            if best_single is None or v > best_single[0]:
                best_single = (v, elem.id)
        executed += 1

    steps.append(TraceStep(cost_t, value_t, 0.0))
    return SieveState(order, prefix_costs, prefix_values, GreedyTrace(steps),
                      executed, best_single)


def _augment(stream, k, oracle, state: SieveState, ledger):
    """One pass matching every outside element to its deepest fitting prefix.

    Prefixes follow a greedy reordering of the collected set rather than
    insertion order; the whole set still fits the budget, so the reorder is
    in-memory and costs no stream pass.  Using the same order as the
    one-machine distributed run keeps the two variants value-identical.
    """
    inst = oracle.instance
    member = set(state.order)
    run = _run_greedy(inst, oracle, ledger, restrict_to=member)
    order, costs = run.prefix_ids, run.prefix_costs
    best = [(v, None) for v in run.prefix_values]
    for elem in stream.scan():
        eid = elem.id
        if eid in member:
            continue
        c_e = inst.cost_of(eid)
        j = bisect.bisect_right(costs, k - c_e) - 1
        if j < 0:
            continue  # does not fit even the empty prefix
        v = oracle.evaluate(frozenset(order[:j]) | {eid}, ledger)
        if v > best[j][0]:
            best[j] = (v, eid)
    best_j = max(range(len(best)), key=lambda j: (best[j][0], -j))
    value, aug = best[best_j]
    ids = set(order[:best_j])
    if aug is not None:
        ids.add(aug)
    return ids, value


def _start(stream, oracle, ledger):
    return time.perf_counter(), ledger.query_count, stream.pass_count


def _finish(name, instance, ledger, stream, started, q0, p0, ids, value, trace):
    ids = frozenset(ids)
    return AlgoReport(
        algorithm=name,
        solution=Solution(ids, value, instance.cost(ids)),
        queries=ledger.query_count - q0,
        passes=stream.pass_count - p0,
        wall_time=time.perf_counter() - started,
        trace=trace,
    )


def sieve(stream: StreamSource, k: float, oracle: SubmodularOracle,
          lam: float, alpha: float, epsilon: float,
          ledger: QueryLedger | None = None,
          density_cap: float | None = None) -> AlgoReport:
    """Thresholding stage alone: return the collected set."""
    ledger = ledger or QueryLedger()
    started, q0, p0 = _start(stream, oracle, ledger)
    levels = threshold_levels(lam, alpha, epsilon, k)
    state = _collect(stream, k, oracle, levels, ledger, density_cap, False)
    return _finish("sieve", oracle.instance, ledger, stream, started, q0, p0,
                   state.order, state.value, state.trace)


def sieve_or_max(stream: StreamSource, k: float, oracle: SubmodularOracle,
                 lam: float, alpha: float, epsilon: float,
                 ledger: QueryLedger | None = None,
                 density_cap: float | None = None) -> AlgoReport:
    """Better of the collected set and the best feasible singleton."""
    ledger = ledger or QueryLedger()
    started, q0, p0 = _start(stream, oracle, ledger)
    levels = threshold_levels(lam, alpha, epsilon, k)
    state = _collect(stream, k, oracle, levels, ledger, density_cap, True)
    ids, value = state.order, state.value
    if state.best_singleton is not None and state.best_singleton[0] > value:
        value, ids = state.best_singleton[0], [state.best_singleton[1]]
    return _finish("sieve_or_max", oracle.instance, ledger, stream, started,
                   q0, p0, ids, value, state.trace)


def sieve_plus_max(stream: StreamSource, k: float, oracle: SubmodularOracle,
                   lam: float, alpha: float, epsilon: float,
                   ledger: QueryLedger | None = None,
                   density_cap: float | None = None) -> AlgoReport:
    """Thresholding plus one augmentation pass over collected-set prefixes.

    The collection is reordered greedily in memory, then every outside
    element is tried on the deepest reordered prefix it still fits (binary
    search over the monotone prefix costs); the answer is the best
    prefix-plus-one-item combination, bare prefixes included.
    """
    ledger = ledger or QueryLedger()
    started, q0, p0 = _start(stream, oracle, ledger)
    levels = threshold_levels(lam, alpha, epsilon, k)
    state = _collect(stream, k, oracle, levels, ledger, density_cap, False)
    ids, value = _augment(stream, k, oracle, state, ledger)
    return _finish("sieve_plus_max", oracle.instance, ledger, stream, started,
                   q0, p0, ids, value, state.trace)


def estimate_lambda(stream: StreamSource, k: float, oracle: SubmodularOracle,
                    epsilon_est: float = 1 / 6,
                    ledger: QueryLedger | None = None) -> OptEstimate:
    """Single-pass constant-factor estimate of the optimal value.

    Maintains parallel threshold sets on the absolute geometric grid
    (1+epsilon_est)^i, keeping only indices between the adaptive floor
    max(2*LB, 2*best-singleton)/(3k) and the best singleton value.  Each
    arriving element joins every maintained set whose threshold its marginal
    density meets, provided the set stays within budget, so every set is
    feasible and the estimate never exceeds the optimum.  Returns an
    estimate unpacking as (lam, alpha) with alpha = 1/3 - epsilon_est.
    """
    if epsilon_est <= 0 or epsilon_est >= 1 / 3:
        raise ValueError("epsilon_est must lie in (0, 1/3)")
    ledger = ledger or QueryLedger()
    inst = oracle.instance
    base = 1.0 + epsilon_est
    log_base = math.log(base)

    delta = 0.0          # best singleton value so far
    best_single = None
    lb = 0.0             # best collected-set value so far
    max_density = 0.0
    sets: dict[int, list] = {}   # grid index -> [member set, cost, value]
    peak = 0

    for elem in stream.scan():
        eid = elem.id
        c_e = inst.cost_of(eid)
        fe = oracle.evaluate((eid,), ledger)
        if fe > delta:
            delta = fe
        if best_single is None or fe > best_single[0]:
            best_single = (fe, eid)
        if c_e > 0:
            max_density = max(max_density, fe / c_e)
        if delta <= 0:
            continue

        tau_min = max(2.0 * lb, 2.0 * delta) / (3.0 * k)
        # active grid indices: tau_min/base <= base^i <= delta
        i_lo = math.ceil(math.log(tau_min / base) / log_base - 1e-9)
        i_hi = math.floor(math.log(delta) / log_base + 1e-9)
        for i in [i for i in sets if i < i_lo]:
            del sets[i]
        for i in range(i_lo, i_hi + 1):
            entry = sets.get(i)
            if entry is None:
                entry = sets[i] = [set(), 0.0, 0.0]
            members, cost_s, value_s = entry
            if eid in members or cost_s + c_e > k:
                continue
            gain = oracle.marginal_gain(eid, members, ledger, cached=value_s)
            if gain / c_e >= base ** i:
                members.add(eid)
                entry[1] = cost_s + c_e
                entry[2] = value_s + gain
                lb = max(lb, entry[2])
        peak = max(peak, sum(len(entry[0]) for entry in sets.values()))

    return OptEstimate(max(lb, delta), 1 / 3 - epsilon_est, max_density, peak,
                       best_single)
