"""Shared test fixtures: hand-built oracles and independent brute-force
oracles that the fast implementations are checked against."""
from __future__ import annotations

import itertools
import random
from typing import Mapping, Sequence

from wftune.core import (
    Config,
    EMPTY,
    QUERY,
    RecommendationSchedule,
    Statement,
    TransitionCostTable,
    UPDATE,
)
from wftune.synthetic import StatementTemplate, SyntheticCatalog
from wftune.core import Index


class TableOracle:
    """Cost oracle backed by explicit per-statement subset tables; the tables
    may be arbitrary (adversarial), only keyed by config ∩ relevant."""

    def __init__(self, tables: Mapping[object, Mapping[Config, float]]):
        self._tables = {k: dict(v) for k, v in tables.items()}

    def what_if_cost(self, stmt: Statement, config: Config) -> float:
        return self._tables[stmt.payload][config & stmt.relevant]


def statement(position: int, payload: object, relevant, kind: str = QUERY) -> Statement:
    return Statement(position=position, kind=kind, payload=payload, relevant=frozenset(relevant))


def subsets(ids) -> list[Config]:
    ids = sorted(ids)
    return [
        frozenset(combo)
        for r in range(len(ids) + 1)
        for combo in itertools.combinations(ids, r)
    ]


def random_table_fixture(
    rng: random.Random,
    ids: Sequence[int],
    length: int,
    cost_range=(0, 60),
    create_range=(0, 40),
    drop_range=(0, 10),
) -> tuple[list[Statement], TableOracle, TransitionCostTable]:
    """Adversarial integer-valued fixture: arbitrary per-subset costs."""
    tables = {}
    statements = []
    for n in range(1, length + 1):
        key = f"s{n}"
        tables[key] = {s: float(rng.randint(*cost_range)) for s in subsets(ids)}
        statements.append(statement(n, key, ids))
    oracle = TableOracle(tables)
    table = TransitionCostTable(
        {a: float(rng.randint(*create_range)) for a in ids},
        {a: float(rng.randint(*drop_range)) for a in ids},
    )
    return statements, oracle, table


def random_stable_fixture(
    rng: random.Random,
    parts: Sequence[Sequence[int]],
    length: int,
    benefit_range=(0, 30),
    base_extra=(0, 40),
    create_range=(0, 40),
    drop_range=(0, 10),
) -> tuple[list[Statement], TableOracle, TransitionCostTable]:
    """Fixture whose costs decompose exactly across the given parts: each
    statement draws an arbitrary per-subset gain table inside every part."""
    ids = sorted(a for part in parts for a in part)
    tables = {}
    statements = []
    for n in range(1, length + 1):
        gains = []
        for part in parts:
            table = {s: float(rng.randint(*benefit_range)) for s in subsets(part)}
            table[EMPTY] = 0.0
            gains.append(table)
        base = sum(max(t.values()) for t in gains) + rng.randint(*base_extra)
        full = {}
        for s in subsets(ids):
            full[s] = float(base) - sum(
                t[s & frozenset(part)] for t, part in zip(gains, parts)
            )
        key = f"s{n}"
        tables[key] = full
        statements.append(statement(n, key, ids))
    oracle = TableOracle(tables)
    table = TransitionCostTable(
        {a: float(rng.randint(*create_range)) for a in ids},
        {a: float(rng.randint(*drop_range)) for a in ids},
    )
    return statements, oracle, table


def enumerate_best_schedule(
    statements: Sequence[Statement],
    ids: Sequence[int],
    start: Config,
    oracle,
    table: TransitionCostTable,
) -> float:
    """Independent optimum oracle: evaluate every schedule explicitly."""
    best = float("inf")
    configs = subsets(ids)
    for combo in itertools.product(configs, repeat=len(statements)):
        total = 0.0
        previous = start
        for stmt, config in zip(statements, combo):
            total += table.transition_cost(previous, config)
            total += oracle.what_if_cost(stmt, config)
            previous = config
        best = min(best, total)
    return best


def enumerate_best_schedule_tensor(
    statements: Sequence[Statement],
    ids: Sequence[int],
    start: Config,
    oracle,
    table: TransitionCostTable,
) -> float:
    """Same exhaustive enumeration, but materializing the cost of every one
    of the (2^|ids|)^N schedules in a flat array before taking the minimum.

    Schedules are laid out with the latest statement's configuration as the
    fastest-varying axis, so each expansion step appends one leg of
    transition-plus-statement cost to every existing prefix.
    """
    import numpy as np

    configs = subsets(ids)
    count = len(configs)
    hop = np.array([[table.transition_cost(x, y) for y in configs] for x in configs])
    totals = np.array(
        [
            table.transition_cost(start, y) + oracle.what_if_cost(statements[0], y)
            for y in configs
        ]
    )
    for stmt in statements[1:]:
        leg = hop + np.array([oracle.what_if_cost(stmt, y) for y in configs])[None, :]
        totals = (totals.reshape(-1, count)[:, :, None] + leg[None, :, :]).reshape(-1)
    return float(totals.min())


def windowed_rate_reference(entries, now: int) -> float:
    """Independent reimplementation of the recency-weighted rate: evaluate
    every window length explicitly."""
    if not entries:
        return 0.0
    newest_first = sorted(entries, key=lambda e: -e[0])
    best = 0.0
    for length in range(1, len(newest_first) + 1):
        window = newest_first[:length]
        total = sum(v for _, v in window)
        best = max(best, total / (now - window[-1][0] + 1))
    return best


def single_index_catalog() -> tuple[SyntheticCatalog, list[Statement]]:
    """The one-index walkthrough fixture: creating the index costs 20 and
    dropping it is free; two queries it helps (by 10 and 18) followed by an
    update that penalizes it by 5."""
    indices = [Index(0, "ix_demo")]
    create = {0: 20.0}
    drop = {0: 0.0}
    groups = [frozenset({0})]
    a = frozenset({0})
    templates = [
        StatementTemplate("q1", QUERY, 15.0, {0: {EMPTY: 0.0, a: 10.0}}, {}, a),
        StatementTemplate("q2", QUERY, 20.0, {0: {EMPTY: 0.0, a: 18.0}}, {}, a),
        StatementTemplate("u3", UPDATE, 15.0, {}, {0: 5.0}, a),
    ]
    catalog = SyntheticCatalog(indices, create, drop, groups, templates)
    statements = [
        catalog.statement(1, "q1"),
        catalog.statement(2, "q2"),
        catalog.statement(3, "u3"),
    ]
    return catalog, statements


def synergy_catalog(bonus: float = 4.0) -> tuple[SyntheticCatalog, Statement]:
    """Three indices in one group whose joint use earns a flat bonus, so any
    pair interacts by exactly the bonus."""
    ids = [0, 1, 2]
    singles = {0: 7.0, 1: 5.0, 2: 9.0}
    table: dict[Config, float] = {}
    for s in subsets(ids):
        value = sum(singles[a] for a in s)
        if len(s) >= 2:
            value += bonus
        table[s] = value
    indices = [Index(a, f"ix_{a}") for a in ids]
    tpl = StatementTemplate("q", QUERY, 60.0, {0: table}, {}, frozenset(ids))
    catalog = SyntheticCatalog(
        indices,
        {a: 10.0 for a in ids},
        {a: 1.0 for a in ids},
        [frozenset(ids)],
        [tpl],
    )
    return catalog, catalog.statement(1, "q")


def independent_pair_catalog() -> tuple[SyntheticCatalog, Statement]:
    """Two singleton groups: the indices never interact."""
    indices = [Index(0, "ix_a"), Index(1, "ix_b")]
    templates = [
        StatementTemplate(
            "q",
            QUERY,
            40.0,
            {
                0: {EMPTY: 0.0, frozenset({0}): 12.0},
                1: {EMPTY: 0.0, frozenset({1}): 7.0},
            },
            {},
            frozenset({0, 1}),
        )
    ]
    catalog = SyntheticCatalog(
        indices,
        {0: 9.0, 1: 11.0},
        {0: 1.0, 1: 2.0},
        [frozenset({0}), frozenset({1})],
        templates,
    )
    return catalog, catalog.statement(1, "q")


def replay_recommendations(
    engine_factory, statements: Sequence[Statement], oracle
) -> list[Config]:
    """Drive a fresh engine over a workload, returning the recommendation
    after every statement."""
    engine = engine_factory()
    out = []
    for stmt in statements:
        engine.analyze_query(stmt, oracle)
        out.append(engine.recommend())
    return out


def schedule_from(recs: Sequence[Config], start: Config) -> RecommendationSchedule:
    return RecommendationSchedule(initial=start, steps=tuple(recs))
