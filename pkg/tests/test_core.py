"""Instance plumbing: normalization, ledger accounting, brute force, bounds."""

import itertools
import math
import threading
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knapsub import (
    BudgetExceeded,
    Element,
    EmptyInstanceWarning,
    GreedyTrace,
    InfeasibleQuery,
    Instance,
    ModularObjective,
    QueryLedger,
    SubmodularOracle,
    TooLarge,
    TraceStep,
    brute_force_opt,
    normalize,
    upper_bound_opt,
)
from knapsub.offline import greedy

from helpers import tight_oracle


def test_instance_rejects_nonpositive_cost():
    with pytest.raises(ValueError):
        Instance([Element(0, 0.0)], 2.0)
    with pytest.raises(ValueError):
        Instance([Element(0, -1.0)], 2.0)


def test_instance_rejects_oversized_element():
    with pytest.raises(ValueError):
        Instance([Element(0, 3.0)], 2.0)


def test_instance_accessors():
    inst = Instance([Element(0, 1.0), Element(1, 2.0)], 3.0, base_set={7})
    assert inst.n == 2
    assert inst.k_tilde == 2
    assert inst.cost_of(0) == 1.0
    assert inst.cost_of(7) == 0.0  # base items are free
    assert inst.cost({0, 1}) == 3.0
    assert inst.fits({0, 1})
    assert not inst.fits({0, 1, 7}) or inst.cost({0, 1, 7}) <= 3.0


def test_k_tilde_truncates_at_n():
    inst = Instance([Element(0, 1.0), Element(1, 1.0)], 100.0)
    assert inst.k_tilde == 2
    inst = Instance([Element(i, 1.0) for i in range(5)], 3.5)
    assert inst.k_tilde == 3


def test_normalize_moves_free_items_to_base():
    inst = normalize([(0, 0.0), (1, 2.0), (2, 4.0)], 8.0)
    assert inst.base_set == frozenset({0})
    assert sorted((e.id, e.cost) for e in inst.elements) == [(1, 1.0), (2, 2.0)]
    assert inst.capacity == 4.0


def test_normalize_identity_when_already_normalized():
    inst = normalize([(1, 1.0), (2, 1.0), (3, 1.1)], 2.0)
    assert sorted((e.id, e.cost) for e in inst.elements) == [
        (1, 1.0), (2, 1.0), (3, 1.1)]
    assert inst.capacity == 2.0


def test_normalize_rescales_fractional_costs():
    inst = normalize([(1, 0.5), (2, 0.5), (3, 0.55)], 1.0)
    assert sorted((e.id, e.cost) for e in inst.elements) == [
        (1, 1.0), (2, 1.0), (3, 1.1)]
    assert inst.capacity == 2.0


def test_normalize_drops_items_exceeding_capacity():
    inst = normalize([(0, 1.0), (1, 9.0)], 5.0)
    assert [e.id for e in inst.elements] == [0]


def test_normalize_rejects_negative_cost():
    with pytest.raises(ValueError):
        normalize([(0, -0.25)], 2.0)


def test_normalize_idempotent(corpus):
    for idx in range(10):
        inst, _, _ = corpus(idx)
        again = normalize(inst.elements, inst.capacity, inst.base_set)
        assert again.capacity == inst.capacity
        assert again.base_set == inst.base_set
        assert [(e.id, e.cost) for e in again.elements] == [
            (e.id, e.cost) for e in inst.elements]


def test_normalize_warns_on_empty_result():
    with pytest.warns(EmptyInstanceWarning):
        inst = normalize([(0, 9.0)], 4.0)
    assert inst.empty
    # a surviving base set is not empty, so no warning
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        normalize([(0, 0.0), (1, 9.0)], 4.0)


@given(st.lists(st.tuples(st.integers(0, 50),
                          st.one_of(st.just(0.0), st.floats(1e-6, 40.0))),
                min_size=1, max_size=12, unique_by=lambda t: t[0]),
       st.floats(1.0, 60.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_normalize_properties(raw, capacity):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyInstanceWarning)
        inst = normalize(raw, capacity)
    if inst.elements:
        costs = [e.cost for e in inst.elements]
        assert min(costs) == 1.0
        assert all(c <= inst.capacity for c in costs)
    surviving = {e.id for e in inst.elements} | set(inst.base_set)
    assert surviving <= {i for i, _ in raw}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyInstanceWarning)
        again = normalize(inst.elements, inst.capacity, inst.base_set)
    assert again.capacity == inst.capacity
    assert [(e.id, e.cost) for e in again.elements] == [
        (e.id, e.cost) for e in inst.elements]


def test_ledger_counts_and_snapshot():
    inst = Instance([Element(0, 1.0)], 2.0)
    oracle = SubmodularOracle(inst, lambda s: float(len(s)))
    ledger = QueryLedger()
    assert ledger.query_count == 0
    oracle.evaluate({0}, ledger)
    oracle.evaluate((), ledger)
    assert ledger.query_count == 2
    assert ledger.snapshot() == 2


def test_ledger_budget_stops_before_evaluation():
    inst = Instance([Element(0, 1.0)], 2.0)
    calls = []

    def fn(s):
        calls.append(set(s))
        return float(len(s))

    oracle = SubmodularOracle(inst, fn)
    ledger = QueryLedger(budget=2)
    oracle.evaluate({0}, ledger)
    oracle.evaluate((), ledger)
    with pytest.raises(BudgetExceeded):
        oracle.evaluate({0}, ledger)
    assert len(calls) == 2  # the refused query never reached the function
    assert ledger.query_count == 2


def test_ledger_enforces_feasibility():
    inst = Instance([Element(0, 1.0), Element(1, 2.0)], 2.0)
    oracle = SubmodularOracle(inst, lambda s: float(len(s)))
    ledger = QueryLedger()
    with pytest.raises(InfeasibleQuery):
        oracle.evaluate({0, 1}, ledger)
    assert ledger.query_count == 0

    relaxed = QueryLedger(enforce_feasible=False)
    assert oracle.evaluate({0, 1}, relaxed) == 2.0
    assert relaxed.query_count == 1
    assert relaxed.infeasible_query_count == 1


def test_ledger_thread_exactness():
    inst = Instance([Element(0, 1.0)], 2.0)
    oracle = SubmodularOracle(inst, lambda s: float(len(s)))
    ledger = QueryLedger()

    def worker():
        for _ in range(500):
            oracle.evaluate({0}, ledger)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert ledger.query_count == 8 * 500


def test_oracle_unions_base_set():
    inst = Instance([Element(0, 1.0)], 2.0, base_set={9})
    seen = []

    def fn(s):
        seen.append(frozenset(s))
        return float(len(s))

    oracle = SubmodularOracle(inst, fn)
    ledger = QueryLedger()
    assert oracle.evaluate({0}, ledger) == 2.0
    assert seen[-1] == frozenset({0, 9})
    assert oracle.evaluate((), ledger) == 1.0


def test_marginal_gain_and_density():
    inst = Instance([Element(0, 1.0), Element(1, 2.0)], 3.0)
    weights = ModularObjective({0: 1.0, 1: 3.0})
    oracle = SubmodularOracle(inst, weights.value)
    ledger = QueryLedger()
    base_value = oracle.evaluate({0}, ledger)
    gain = oracle.marginal_gain(1, {0}, ledger, cached=base_value)
    assert gain == pytest.approx(3.0)
    density = oracle.marginal_density(1, {0}, ledger, cached=base_value)
    assert density == pytest.approx(1.5)


def independent_brute(instance, value_fn):
    """Reference optimum via itertools, coded without masks on purpose."""
    ids = sorted(e.id for e in instance.elements)
    best_v = value_fn(frozenset(instance.base_set))
    best_ids = ()
    for r in range(1, len(ids) + 1):
        for combo in itertools.combinations(ids, r):
            if instance.cost(combo) > instance.capacity:
                continue
            v = value_fn(frozenset(combo) | frozenset(instance.base_set))
            if v > best_v or (v == best_v and best_ids and combo < best_ids):
                best_v, best_ids = v, combo
    return best_v, frozenset(best_ids)


def test_brute_force_matches_plain_enumeration(corpus):
    for idx in range(30):
        inst, objective, opt = corpus(idx)
        ref_v, ref_ids = independent_brute(inst, objective.value)
        assert opt.value == ref_v
        assert opt.ids == ref_ids
        assert opt.cost == pytest.approx(inst.cost(opt.ids))
        assert opt.cost <= inst.capacity + 1e-12


def test_brute_force_value_reproducible(corpus):
    for idx in range(10):
        inst, objective, opt = corpus(idx)
        oracle = SubmodularOracle(inst, objective.value)
        assert oracle.evaluate(opt.ids, QueryLedger()) == opt.value


def test_brute_force_tie_breaks_to_smallest_ids():
    inst = Instance([Element(i, 1.0) for i in range(4)], 1.0)
    oracle = SubmodularOracle(inst, lambda s: 1.0 if s else 0.0)
    opt = brute_force_opt(inst, oracle)
    assert opt.ids == frozenset({0})


def test_brute_force_size_guard():
    inst = Instance([Element(i, 1.0) for i in range(23)], 23.0)
    oracle = SubmodularOracle(inst, lambda s: float(len(s)))
    with pytest.raises(TooLarge):
        brute_force_opt(inst, oracle)


def test_upper_bound_on_tight_example():
    inst, oracle = tight_oracle()
    result = greedy(inst, oracle)
    ub = upper_bound_opt(inst, oracle, result.report.trace)
    assert ub == 1.0909090909090908
    opt = brute_force_opt(inst, oracle)
    assert opt.value == 1.0
    assert ub >= opt.value


def test_upper_bound_sound_on_corpus(corpus):
    for idx in range(25):
        inst, objective, opt = corpus(idx)
        oracle = SubmodularOracle(inst, objective.value)
        result = greedy(inst, oracle)
        ub = upper_bound_opt(inst, oracle, result.report.trace)
        assert ub >= opt.value - 1e-9
        assert ub >= result.report.solution.value - 1e-12


def test_trace_piecewise_curve():
    trace = GreedyTrace([
        TraceStep(0.0, 0.0, 2.0, 2.0),
        TraceStep(1.0, 2.0, 0.5, 1.0),
        TraceStep(3.0, 3.0, 0.0, 0.0),
    ])
    assert trace.breakpoints() == [0.0, 1.0, 3.0]
    assert trace.value_at(-0.5) == 0.0
    assert trace.value_at(0.5) == 1.0
    assert trace.value_at(1.0) == 2.0
    assert trace.value_at(2.0) == 2.5
    assert trace.value_at(3.0) == 3.0
    assert trace.value_at(4.0) == 3.0  # terminal slope is zero
    assert trace.right_derivative_at(0.0) == 2.0
    assert trace.right_derivative_at(1.5) == 0.5
    assert trace.right_derivative_at(3.0) == 0.0
    trace.validate(offline=True)


def test_trace_validate_flags_violations():
    bad = GreedyTrace([TraceStep(0.0, 1.0, 1.0, 1.0),
                       TraceStep(1.0, 0.5, 0.0, 0.0)])
    with pytest.raises(AssertionError):
        bad.validate()
    not_concave = GreedyTrace([TraceStep(0.0, 0.0, 1.0, 1.0),
                               TraceStep(1.0, 1.0, 2.0, 2.0)])
    not_concave.validate()  # fine as a stream trace
    with pytest.raises(AssertionError):
        not_concave.validate(offline=True)


def test_solution_value_matches_fresh_evaluation(corpus):
    for idx in range(8):
        inst, objective, opt = corpus(idx)
        assert objective.value(frozenset(opt.ids) | frozenset(inst.base_set)) \
            == opt.value


@given(st.integers(0, 400))
@settings(max_examples=60, deadline=None)
def test_corpus_instances_well_formed(idx):
    from conftest import make_instance
    inst, objective = make_instance(idx)
    assert inst.capacity >= 1.0
    assert all(e.cost >= 1.0 for e in inst.elements)
    assert inst.k_tilde <= inst.n
    v = objective.value(frozenset(e.id for e in inst.elements))
    assert v >= 0.0
    assert math.isfinite(v)
