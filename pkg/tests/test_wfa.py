import random

import pytest

from wftune.core import CachingOracle, CapacityError, EMPTY
from wftune.wfa import WorkFunctionEngine
from helpers import (
    random_table_fixture,
    single_index_catalog,
    subsets,
)

A = frozenset({0})


def min_statement_cost(stmt, oracle, ids):
    return min(oracle.what_if_cost(stmt, s) for s in subsets(ids))


class TestInitialize:
    def test_initial_values_are_transition_costs_from_start(self):
        catalog, _ = single_index_catalog()
        engine = WorkFunctionEngine.initialize([0], EMPTY, catalog.transition_table())
        assert engine.work_value(EMPTY) == 0.0
        assert engine.work_value(A) == 20.0
        assert engine.recommend() == EMPTY

    def test_starting_at_full_set_makes_it_free(self):
        catalog, _ = single_index_catalog()
        engine = WorkFunctionEngine.initialize([0], A, catalog.transition_table())
        assert engine.work_value(A) == 0.0
        assert engine.recommend() == A

    def test_two_index_table_matches_pairwise_transitions(self):
        rng = random.Random(0)
        _, _, table = random_table_fixture(rng, [0, 1], 1)
        start = frozenset({1})
        engine = WorkFunctionEngine.initialize([0, 1], start, table)
        for s in subsets([0, 1]):
            assert engine.work_value(s) == table.transition_cost(start, s)

    def test_candidate_cap_enforced(self):
        ids = list(range(13))
        table_costs = {a: 1.0 for a in ids}
        from wftune.core import TransitionCostTable

        with pytest.raises(CapacityError):
            WorkFunctionEngine.initialize(
                ids, EMPTY, TransitionCostTable(table_costs, table_costs)
            )


class TestWalkthroughTrace:
    """The two-configuration walkthrough: values, scores and recommendations
    are pinned exactly."""

    def test_full_trace(self):
        catalog, statements = single_index_catalog()
        engine = WorkFunctionEngine.initialize([0], EMPTY, catalog.transition_table())
        assert (engine.work_value(EMPTY), engine.work_value(A)) == (0.0, 20.0)

        engine.analyze_query(statements[0], catalog)
        assert (engine.work_value(EMPTY), engine.work_value(A)) == (15.0, 25.0)
        assert engine.recommend() == EMPTY

        engine.analyze_query(statements[1], catalog)
        assert (engine.work_value(EMPTY), engine.work_value(A)) == (27.0, 27.0)
        assert engine.recommend() == A  # tie on score, kept-own-path filter decides

        engine.analyze_query(statements[2], catalog)
        assert (engine.work_value(EMPTY), engine.work_value(A)) == (42.0, 47.0)
        assert engine.score(EMPTY) == 62.0
        assert engine.score(A) == 47.0
        assert engine.recommend() == A  # gap too small to pay the rebuild

    def test_recommend_is_stateless(self):
        catalog, statements = single_index_catalog()
        engine = WorkFunctionEngine.initialize([0], EMPTY, catalog.transition_table())
        engine.analyze_query(statements[0], catalog)
        assert engine.recommend() == engine.recommend() == EMPTY


class TestInvariants:
    def run_random(self, seed, ids, length):
        rng = random.Random(seed)
        statements, oracle, table = random_table_fixture(rng, ids, length)
        engine = WorkFunctionEngine.initialize(ids, EMPTY, table)
        cache = CachingOracle(oracle)
        for stmt in statements:
            before = engine.work_values()
            engine.analyze_query(stmt, cache)
            after = engine.work_values()
            yield stmt, before, after, engine, oracle, table

    @pytest.mark.parametrize("seed", range(6))
    def test_values_grow_at_least_by_cheapest_statement_cost(self, seed):
        ids = [0, 1, 2]
        for stmt, before, after, engine, oracle, table in self.run_random(seed, ids, 12):
            floor = min_statement_cost(stmt, oracle, ids)
            for config in subsets(ids):
                assert after[config] >= before[config] + floor

    @pytest.mark.parametrize("seed", range(6))
    def test_values_stay_transition_lipschitz(self, seed):
        ids = [0, 1, 2]
        for _, _, after, engine, oracle, table in self.run_random(seed, ids, 12):
            for x in subsets(ids):
                for y in subsets(ids):
                    assert after[x] <= after[y] + table.transition_cost(y, x)

    @pytest.mark.parametrize("seed", range(6))
    def test_recommendation_kept_its_own_work_path(self, seed):
        ids = [0, 1, 2]
        for stmt, before, after, engine, oracle, table in self.run_random(seed, ids, 12):
            rec = engine.recommend()
            own = before[rec] + oracle.what_if_cost(stmt, rec)
            assert after[rec] == own

    def test_identical_runs_recommend_identically(self):
        rng = random.Random(5)
        statements, oracle, table = random_table_fixture(rng, [0, 1, 2], 20)
        runs = []
        for _ in range(2):
            engine = WorkFunctionEngine.initialize([0, 1, 2], EMPTY, table)
            recs = []
            for stmt in statements:
                engine.analyze_query(stmt, oracle)
                recs.append(engine.recommend())
            runs.append(recs)
        assert runs[0] == runs[1]


class TestVotes:
    def build(self):
        catalog, statements = single_index_catalog()
        engine = WorkFunctionEngine.initialize([0], EMPTY, catalog.transition_table())
        for stmt in statements[:2]:
            engine.analyze_query(stmt, catalog)
        return engine, catalog, statements

    def test_empty_votes_change_nothing(self):
        engine, _, _ = self.build()
        before = engine.work_values()
        rec = engine.recommend()
        engine.apply_votes(EMPTY, EMPTY)
        assert engine.work_values() == before
        assert engine.recommend() == rec

    def test_positive_vote_switches_and_enforces_round_trip_gap(self):
        catalog, statements = single_index_catalog()
        engine = WorkFunctionEngine.initialize([0], EMPTY, catalog.transition_table())
        engine.analyze_query(statements[0], catalog)
        assert engine.recommend() == EMPTY
        engine.apply_votes(A, EMPTY)
        assert engine.recommend() == A
        table = catalog.transition_table()
        round_trip = table.transition_cost(EMPTY, A) + table.transition_cost(A, EMPTY)
        gap = engine.score(EMPTY) - engine.score(A)
        assert gap >= round_trip

    def test_votes_never_lower_work_values(self):
        engine, catalog, statements = self.build()
        before = engine.work_values()
        engine.apply_votes(EMPTY, A)
        after = engine.work_values()
        for config, value in before.items():
            assert after[config] >= value


def test_tie_break_prefers_config_containing_smallest_differing_id():
    # free transitions and equal costs: everything ties, the preference rule
    # alone decides, and it must favor the configuration holding index 0
    from wftune.core import TransitionCostTable
    from helpers import TableOracle, statement, subsets

    table = TransitionCostTable({0: 0.0, 1: 0.0}, {0: 0.0, 1: 0.0})
    tables = {"q": {s: 5.0 for s in subsets([0, 1])}}
    engine = WorkFunctionEngine.initialize([0, 1], EMPTY, table)
    engine.analyze_query(statement(1, "q", [0, 1]), TableOracle(tables))
    assert engine.recommend() == frozenset({0, 1})
