"""Acceptance suite: one test per release criterion, at pinned tolerances.

Run with `pytest tests/test_acceptance.py`; the terminal summary prints one
PASS/FAIL line per criterion.
"""
import random
import time

import numpy as np
import pytest

from wftune.core import CachingOracle, EMPTY, TransitionCostTable, total_work
from wftune.harness import Scenario, run_scenario
from wftune.offline import optimum
from wftune.partitioned import PartitionedEngine
from wftune.tuner import Tuner
from wftune.wfa import WorkFunctionEngine
from helpers import (
    enumerate_best_schedule_tensor,
    random_stable_fixture,
    random_table_fixture,
    replay_recommendations,
    schedule_from,
    single_index_catalog,
    subsets,
)

A = frozenset({0})


def split_ids(rng, total, parts):
    """Random composition of `total` ids into `parts` nonempty groups."""
    cuts = sorted(rng.sample(range(1, total), parts - 1)) if parts > 1 else []
    bounds = [0, *cuts, total]
    return [list(range(bounds[i], bounds[i + 1])) for i in range(parts)]


@pytest.fixture(scope="module")
def scenario_outcomes():
    """Final metrics row per scenario on the default 8x50 seed-0 workload."""
    outcomes = {}
    for name, lag in (
        ("baseline", 1),
        ("wfit-ind", 1),
        ("good-feedback", 1),
        ("bad-feedback", 1),
        ("lagged", 1),
        ("lagged", 5),
        ("lagged", 10),
        ("lagged", 15),
    ):
        rows = run_scenario(Scenario(name=name, lag=lag))
        outcomes[rows[-1].algo] = rows[-1]
    return outcomes


def test_walkthrough_golden_trace():
    began = time.perf_counter()
    catalog, statements = single_index_catalog()
    engine = WorkFunctionEngine.initialize([0], EMPTY, catalog.transition_table())
    assert (engine.work_value(EMPTY), engine.work_value(A)) == (0.0, 20.0)
    expected = [
        ((15.0, 25.0), EMPTY),
        ((27.0, 27.0), A),
        ((42.0, 47.0), A),
    ]
    for stmt, (values, recommendation) in zip(statements, expected):
        engine.analyze_query(stmt, catalog)
        assert (engine.work_value(EMPTY), engine.work_value(A)) == values
        assert engine.recommend() == recommendation
    assert (engine.score(EMPTY), engine.score(A)) == (62.0, 47.0)
    assert time.perf_counter() - began < 1.0


def test_offline_optimum_equals_exhaustive_enumeration():
    began = time.perf_counter()
    rng = random.Random(20260810)
    for _ in range(200):
        count = rng.randint(1, 4)
        length = rng.randint(1, 6)
        ids = list(range(count))
        statements, oracle, table = random_table_fixture(rng, ids, length)
        start = frozenset(a for a in ids if rng.random() < 0.3)
        result = optimum(statements, ids, start, oracle, table)
        expected = enumerate_best_schedule_tensor(statements, ids, start, oracle, table)
        assert result.per_prefix[-1] == expected
    assert time.perf_counter() - began < 30.0


def test_partitioned_engine_matches_joint_engine():
    began = time.perf_counter()
    rng = random.Random(42)
    for _ in range(100):
        part_count = rng.randint(2, 4)
        total = rng.randint(part_count, 8)
        parts = split_ids(rng, total, part_count)
        length = rng.randint(5, 40)
        statements, oracle, table = random_stable_fixture(rng, parts, length)
        cache = CachingOracle(oracle)
        ids = list(range(total))
        joint = replay_recommendations(
            lambda: WorkFunctionEngine.initialize(ids, EMPTY, table), statements, cache
        )
        split = replay_recommendations(
            lambda: PartitionedEngine.initialize(parts, EMPTY, table), statements, cache
        )
        assert joint == split
    assert time.perf_counter() - began < 120.0


def test_partitioned_work_values_reconstruct_joint_values():
    rng = random.Random(43)
    for _ in range(100):
        part_count = rng.randint(2, 4)
        total = rng.randint(part_count, 8)
        parts = split_ids(rng, total, part_count)
        length = rng.randint(5, 40)
        statements, oracle, table = random_stable_fixture(rng, parts, length)
        ids = list(range(total))
        joint = WorkFunctionEngine.initialize(ids, EMPTY, table)
        split = PartitionedEngine.initialize(parts, EMPTY, table)
        empty_total = 0.0
        spare = len(parts) - 1
        for stmt in statements:
            cache = CachingOracle(oracle)
            joint.analyze_query(stmt, cache)
            split.analyze_query(stmt, cache)
            empty_total += oracle.what_if_cost(stmt, EMPTY)
            reconstructed = (
                sum(engine.gathered_values(ids) for engine in split.engines)
                - spare * empty_total
            )
            np.testing.assert_allclose(
                joint.gathered_values(ids), reconstructed, rtol=1e-9
            )


def test_work_values_grow_by_at_least_the_cheapest_statement_cost():
    rng = random.Random(44)
    for _ in range(25):
        count = rng.randint(1, 4)
        ids = list(range(count))
        statements, oracle, table = random_table_fixture(rng, ids, 12)
        engine = WorkFunctionEngine.initialize(ids, EMPTY, table)
        for stmt in statements:
            before = engine.gathered_values(ids).copy()
            engine.analyze_query(stmt, oracle)
            after = engine.gathered_values(ids)
            floor = min(oracle.what_if_cost(stmt, s) for s in subsets(ids))
            assert (after >= before + floor).all()


def test_cycle_transition_cost_is_reversible():
    rng = random.Random(45)
    for _ in range(1000):
        count = rng.randint(1, 6)
        ids = list(range(count))
        table = TransitionCostTable(
            {a: float(rng.randint(0, 60)) for a in ids},
            {a: float(rng.randint(0, 60)) for a in ids},
        )
        hops = [
            frozenset(a for a in ids if rng.random() < 0.5)
            for _ in range(rng.randint(1, 7))
        ]
        cycle = [hops[0], *hops, hops[0]]
        forward = sum(table.transition_cost(x, y) for x, y in zip(cycle, cycle[1:]))
        back = list(reversed(cycle))
        reverse = sum(table.transition_cost(x, y) for x, y in zip(back, back[1:]))
        assert forward == reverse


def test_competitive_bound_for_single_engine():
    rng = random.Random(46)
    for _ in range(60):
        count = rng.randint(1, 6)
        ids = list(range(count))
        length = rng.randint(5, 50)
        statements, oracle, table = random_table_fixture(rng, ids, length)
        recs = replay_recommendations(
            lambda: WorkFunctionEngine.initialize(ids, EMPTY, table),
            statements,
            CachingOracle(oracle),
        )
        engine_work = total_work(schedule_from(recs, EMPTY), statements, oracle, table)
        best = optimum(statements, ids, EMPTY, oracle, table).per_prefix[-1]
        slack = table.max_pairwise(ids)
        assert engine_work <= (2 ** (count + 1) - 1) * best + 2 ** (count + 2) * slack


def test_competitive_bound_for_partitioned_engine():
    rng = random.Random(47)
    for _ in range(40):
        part_count = rng.randint(2, 3)
        total = rng.randint(part_count, 6)
        parts = split_ids(rng, total, part_count)
        length = rng.randint(5, 50)
        statements, oracle, table = random_stable_fixture(
            rng, parts, length, benefit_range=(-20, 30)
        )
        ids = list(range(total))
        recs = replay_recommendations(
            lambda: PartitionedEngine.initialize(parts, EMPTY, table),
            statements,
            CachingOracle(oracle),
        )
        engine_work = total_work(schedule_from(recs, EMPTY), statements, oracle, table)
        best = optimum(statements, ids, EMPTY, oracle, table).per_prefix[-1]
        widest = max(len(p) for p in parts)
        slack = len(parts) * 2 ** (widest + 2) * table.max_pairwise(ids)
        assert engine_work <= (2 ** (widest + 1) - 1) * best + slack


def test_feedback_consistency_and_score_threshold_under_fuzz():
    rng = random.Random(48)
    parts = [[0, 1, 2, 3], [4, 5]]
    statements, oracle, table = random_stable_fixture(rng, parts, 400)
    tuner = Tuner(table, oracle, EMPTY, fixed_partition=[frozenset(p) for p in parts])
    ids = list(range(6))
    cursor = 0
    votes_cast = 0
    while votes_cast < 1000:
        if rng.random() < 0.25 and cursor < len(statements):
            tuner.analyze_query(statements[cursor])
            cursor += 1
            continue
        plus = frozenset(a for a in ids if rng.random() < 0.25)
        minus = frozenset(a for a in ids if a not in plus and rng.random() < 0.25)
        tuner.feedback(plus, minus)
        votes_cast += 1
        recommendation = tuner.recommend()
        fc_plus, fc_minus = tuner.pending_votes
        assert fc_plus <= recommendation and not recommendation & fc_minus
        for engine in tuner.engines:
            part = frozenset(engine.candidates)
            held = engine.recommend()
            base = engine.work_value(held)
            for config in subsets(part):
                consistent = (config - minus) | (plus & part)
                round_trip = table.transition_cost(config, consistent) + (
                    table.transition_cost(consistent, config)
                )
                gap = (
                    engine.work_value(config)
                    + table.transition_cost(config, held)
                    - base
                )
                assert gap >= round_trip


def test_adversarial_feedback_recovery_stays_near_baseline(scenario_outcomes):
    baseline = scenario_outcomes["baseline"].ratio
    bad = scenario_outcomes["bad-feedback"].ratio
    assert abs(bad - baseline) <= 0.15
    assert baseline == pytest.approx(0.9390584431489737, rel=1e-9)
    assert bad == pytest.approx(0.9390584431489737, rel=1e-9)


def test_feedback_and_interaction_scenario_ordering(scenario_outcomes):
    began = time.perf_counter()
    good = scenario_outcomes["good-feedback"].ratio
    baseline = scenario_outcomes["baseline"].ratio
    independent = scenario_outcomes["wfit-ind"].ratio
    assert good >= baseline >= independent
    assert good == pytest.approx(1.0, rel=1e-9)
    assert independent == pytest.approx(0.8986030376898556, rel=1e-9)
    prompt = scenario_outcomes["lagged-1"].ratio
    assert prompt == pytest.approx(0.9390584431489737, rel=1e-9)
    lagged = {t: scenario_outcomes[f"lagged-{t}"].ratio for t in (5, 10, 15)}
    assert all(lagged[t] < prompt for t in (5, 10, 15))
    assert lagged[5] == pytest.approx(0.8748174516246805, rel=1e-9)
    assert lagged[10] == pytest.approx(0.8292165938486827, rel=1e-9)
    assert lagged[15] == pytest.approx(0.7888477366255144, rel=1e-9)
    assert time.perf_counter() - began < 300.0


def test_repartition_round_trips_preserve_recommendations():
    rng = random.Random(49)
    for _ in range(50):
        group_count = rng.randint(2, 4)
        total = rng.randint(group_count, 7)
        groups = split_ids(rng, total, group_count)
        length = rng.randint(9, 24)
        statements, oracle, table = random_stable_fixture(rng, groups, length)
        fine = [frozenset(g) for g in groups]
        merge_at = rng.randrange(len(fine) - 1)
        coarse = [
            part
            for i, part in enumerate(fine)
            if i not in (merge_at, merge_at + 1)
        ] + [fine[merge_at] | fine[merge_at + 1]]
        switching = Tuner(table, oracle, EMPTY, fixed_partition=fine)
        steady = Tuner(table, oracle, EMPTY, fixed_partition=fine)
        third = len(statements) // 3
        for i, stmt in enumerate(statements):
            if i == third:
                switching.repartition(coarse)
            if i == 2 * third:
                switching.repartition(fine)
            switching.analyze_query(stmt)
            steady.analyze_query(stmt)
            assert switching.recommend() == steady.recommend()
