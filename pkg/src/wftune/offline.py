"""Exact offline baseline: the cheapest possible recommendation schedule.

A forward dynamic program over the configuration lattice yields, in one pass,
the optimal total work for every workload prefix plus one optimal schedule
via backpointers. Also synthesizes the prescient-DBA feedback streams used by
the experiment harness (votes mirroring the optimal schedule's changes, or
their exact opposite).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import bits
from .core import (
    CapacityError,
    Config,
    CostOracle,
    EMPTY,
    FeedbackEvent,
    RecommendationSchedule,
    Statement,
    TransitionCostTable,
    as_caching,
)
from .wfa import CANDIDATE_CAP


@dataclass(frozen=True)
class OptResult:
    """Offline optimum over one candidate space.

    `per_prefix[n]` is the minimum total work over the first n statements
    (index 0 is the empty prefix); `schedule` attains `per_prefix[-1]`;
    `statement_minima[i]` holds the cheapest possible cost of statement i and
    a configuration achieving it.
    """

    candidates: tuple[int, ...]
    start: Config
    per_prefix: tuple[float, ...]
    schedule: RecommendationSchedule
    statement_minima: tuple[tuple[float, Config], ...]


def optimum(
    statements: Sequence[Statement],
    candidates: Sequence[int],
    start: Config,
    oracle: CostOracle,
    table: TransitionCostTable,
) -> OptResult:
    """One forward pass of the work recurrence with backpointers; ties are
    broken by the engine-wide deterministic preference at every step."""
    cands = tuple(sorted(set(candidates)))
    if len(cands) > CANDIDATE_CAP:
        raise CapacityError(
            f"{len(cands)} candidates exceed the exact-optimum cap of {CANDIDATE_CAP}"
        )
    if not frozenset(start) <= set(cands):
        raise ValueError("starting configuration must be within the candidates")
    size = 1 << len(cands)
    masks = np.arange(size, dtype=np.int32)
    create_sums = bits.subset_sums([table.create_cost(a) for a in cands])
    drop_sums = bits.subset_sums([table.drop_cost(a) for a in cands])
    transition = (
        create_sums[masks[None, :] & ~masks[:, None]]
        + drop_sums[masks[:, None] & ~masks[None, :]]
    )
    order = np.argsort(-bits.bit_reversed(len(cands)))  # preference-descending
    cache = as_caching(oracle)

    w = bits.delta_from(bits.mask_of(start, cands), masks, create_sums, drop_sums)
    per_prefix = [0.0]
    minima: list[tuple[float, Config]] = []
    final_configs: list[int] = []
    backpointers: list[np.ndarray] = []
    columns = np.arange(size)
    for stmt in statements:
        costs = cache.cost_vector(stmt, cands)
        base = w + costs
        base_ordered = base[order]
        pick = int(order[np.argmin(base_ordered)])
        final_configs.append(pick)
        per_prefix.append(float(base[pick]))
        cheapest = int(order[np.argmin(costs[order])])
        minima.append((float(costs[cheapest]), bits.members_of(cheapest, cands)))
        totals = base_ordered[:, None] + transition[order, :]
        rows = np.argmin(totals, axis=0)
        w = totals[rows, columns]
        backpointers.append(order[rows])

    steps: list[int] = []
    if statements:
        steps = [0] * len(statements)
        steps[-1] = final_configs[-1]
        for i in range(len(statements) - 2, -1, -1):
            steps[i] = int(backpointers[i][steps[i + 1]])
    schedule = RecommendationSchedule(
        initial=frozenset(start),
        steps=tuple(bits.members_of(m, cands) for m in steps),
    )
    return OptResult(cands, frozenset(start), tuple(per_prefix), schedule, tuple(minima))


def optimum_over_partition(
    statements: Sequence[Statement],
    parts: Sequence[Config],
    start: Config,
    oracle: CostOracle,
    table: TransitionCostTable,
) -> OptResult:
    """Optimum over a partitioned candidate space, solved part by part.

    Per-part totals recombine to the joint optimum exactly when the partition
    is stable (per-part benefits add); the shared empty-configuration
    processing cost is counted once per extra part and must be removed.
    """
    parts = [frozenset(p) for p in parts if p]
    if not parts:
        return optimum(statements, (), start, oracle, table)
    cache = as_caching(oracle)
    results = [
        optimum(statements, sorted(part), start & part, cache, table) for part in parts
    ]
    empty_prefix = [0.0]
    for stmt in statements:
        empty_prefix.append(empty_prefix[-1] + cache.what_if_cost(stmt, EMPTY))

    spare = len(parts) - 1
    per_prefix = tuple(
        sum(r.per_prefix[n] for r in results) - spare * empty_prefix[n]
        for n in range(len(statements) + 1)
    )
    steps = tuple(
        frozenset().union(*(r.schedule.steps[i] for r in results))
        for i in range(len(statements))
    )
    minima = tuple(
        (
            sum(r.statement_minima[i][0] for r in results)
            - spare * (empty_prefix[i + 1] - empty_prefix[i]),
            frozenset().union(*(r.statement_minima[i][1] for r in results)),
        )
        for i in range(len(statements))
    )
    candidates = tuple(sorted(frozenset().union(*parts)))
    return OptResult(
        candidates,
        frozenset(start),
        per_prefix,
        RecommendationSchedule(frozenset(start), steps),
        minima,
    )


def synthesize_feedback(
    schedule: RecommendationSchedule, polarity: str = "good"
) -> list[FeedbackEvent]:
    """Votes of a prescient DBA: whenever the optimal schedule changes its
    configuration after statement n, vote for what it creates and against
    what it drops (event position n, applied before statement n+1). The
    `bad` polarity swaps the vote signs."""
    if polarity not in ("good", "bad"):
        raise ValueError("polarity must be good or bad")
    events: list[FeedbackEvent] = []
    previous = schedule.initial
    for position, config in enumerate(schedule.steps):
        if config != previous:
            created = config - previous
            dropped = previous - config
            if polarity == "bad":
                created, dropped = dropped, created
            events.append(FeedbackEvent(position=position, plus=created, minus=dropped))
        previous = config
    return events
