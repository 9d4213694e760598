"""Semi-automatic index tuner.

Wraps a partitioned work-function engine with the three online concerns it
cannot handle alone: DBA feedback (explicit votes or implicit votes derived
from manual index changes), statistics-driven candidate selection, and
reorganization of the candidate partition as the observed interactions
shift. Recommendations always honor votes cast since the last statement; the
workload may override older votes.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import bits
from .core import (
    CatalogError,
    Config,
    ConfigurationError,
    CostOracle,
    DOI_ENUMERATION_CAP,
    EMPTY,
    Statement,
    TransitionCostTable,
    as_caching,
    benefit,
)
from .partitioned import PartitionedEngine
from .wfa import CANDIDATE_CAP, WorkFunctionEngine


@dataclass(frozen=True)
class TunerConfig:
    """Knobs bounding the tuner's bookkeeping.

    `idx_cnt` caps how many indices are monitored at once, `state_cnt` caps
    the total number of tracked configurations across parts, `hist_size` caps
    per-index statistics rings, and `rand_cnt` is the number of randomized
    partition searches per statement. All are trade-offs between overhead and
    recommendation quality.
    """

    idx_cnt: int = 40
    state_cnt: int = 500
    hist_size: int = 100
    rand_cnt: int = 100
    seed: int = 0
    doi_cap: int = DOI_ENUMERATION_CAP
    part_cap: int = CANDIDATE_CAP

    def __post_init__(self) -> None:
        if self.idx_cnt < 1:
            raise ConfigurationError("idx_cnt must be positive")
        if self.state_cnt < 2 * self.idx_cnt:
            raise ConfigurationError(
                "state_cnt must be at least twice idx_cnt so that an "
                "all-singleton partition always fits"
            )
        if self.hist_size < 1:
            raise ConfigurationError("hist_size must be positive")
        if self.rand_cnt < 0:
            raise ConfigurationError("rand_cnt must be nonnegative")


def statement_statistics(
    stmt: Statement,
    cache,
    cap: int = DOI_ENUMERATION_CAP,
) -> tuple[dict[int, float], dict[tuple[int, int], float]]:
    """Exact per-index maximum benefits and pairwise interaction degrees for
    one statement, brute-forced over every subset of its relevant indices.

    Only positive values are reported. When the relevant set exceeds `cap`,
    the strongest indices by single-index benefit are kept and the rest are
    ignored for this statement.
    """
    relevant = sorted(stmt.relevant)
    if len(relevant) > cap:
        gain = {a: benefit(stmt, frozenset({a}), EMPTY, cache) for a in relevant}
        relevant = sorted(sorted(relevant, key=lambda a: (-gain[a], a))[:cap])
    if not relevant:
        return {}, {}
    costs = cache.cost_vector(stmt, tuple(relevant))
    benefits: dict[int, float] = {}
    for i, a in enumerate(relevant):
        half = costs.reshape(-1, 2, 1 << i)
        best = float((half[:, 0, :] - half[:, 1, :]).max())
        if best > 0:
            benefits[a] = best
    interactions: dict[tuple[int, int], float] = {}
    masks = np.arange(costs.size, dtype=np.int64)
    for i in range(len(relevant)):
        for j in range(i + 1, len(relevant)):
            bi, bj = 1 << i, 1 << j
            free = masks[(masks & (bi | bj)) == 0]
            paired = costs[free] + costs[free | (bi | bj)]
            separate = costs[free | bi] + costs[free | bj]
            strength = float(np.abs(paired - separate).max())
            if strength > 0:
                interactions[(relevant[i], relevant[j])] = strength
    return benefits, interactions


def choose_partition(
    ids: Iterable[int],
    pair_weight: Mapping[tuple[int, int], float],
    current_parts: Sequence[Config],
    state_cnt: int,
    rand_cnt: int,
    rng: random.Random,
    part_cap: int = CANDIDATE_CAP,
) -> list[Config]:
    """Pick a partition of `ids` minimizing the interaction weight that ends
    up split across parts, subject to the state budget.

    Tries the current partition (restricted to `ids`, new ids as singletons)
    first, then `rand_cnt` randomized greedy merge runs: singleton pairs merge
    with probability proportional to their weight, larger parts pay for the
    extra states their merge would track. Returns the best partition seen.
    """
    members = sorted(set(ids))
    if not members:
        return []
    if 2 * len(members) > state_cnt:
        raise ConfigurationError(
            f"state budget {state_cnt} cannot hold even singleton parts "
            f"for {len(members)} indices"
        )
    chosen = frozenset(members)
    edges = [
        (a, b, w)
        for (a, b), w in sorted(pair_weight.items())
        if w > 0 and a in chosen and b in chosen
    ]

    def loss_of(part_of: Mapping[int, int]) -> float:
        return sum(w for a, b, w in edges if part_of[a] != part_of[b])

    def assignment(parts: Sequence[Config]) -> dict[int, int]:
        return {a: i for i, part in enumerate(parts) for a in part}

    def feasible(parts: Sequence[Config]) -> bool:
        return (
            sum(1 << len(p) for p in parts) <= state_cnt
            and max((len(p) for p in parts), default=0) <= part_cap
        )

    best: list[Config] | None = None
    best_loss = float("inf")

    kept = [part & chosen for part in current_parts if part & chosen]
    covered = frozenset().union(*kept) if kept else EMPTY
    baseline = kept + [frozenset({a}) for a in members if a not in covered]
    if feasible(baseline):
        best, best_loss = baseline, loss_of(assignment(baseline))

    for _ in range(rand_cnt):
        if best_loss == 0.0:
            break
        part_of = {a: i for i, a in enumerate(members)}
        sizes = {i: 1 for i in range(len(members))}
        total_states = 2 * len(members)
        while True:
            cross: dict[tuple[int, int], float] = {}
            for a, b, w in edges:
                i, j = part_of[a], part_of[b]
                if i != j:
                    key = (i, j) if i < j else (j, i)
                    cross[key] = cross.get(key, 0.0) + w
            mergeable = []
            for (i, j), w in cross.items():
                si, sj = sizes[i], sizes[j]
                grown = total_states - (1 << si) - (1 << sj) + (1 << (si + sj))
                if grown <= state_cnt and si + sj <= part_cap:
                    mergeable.append((i, j, w))
            if not mergeable:
                break
            singles = [e for e in mergeable if sizes[e[0]] == 1 and sizes[e[1]] == 1]
            if singles:
                pool, weights = singles, [w for _, _, w in singles]
            else:
                pool = mergeable
                weights = [
                    w / ((1 << (sizes[i] + sizes[j])) - (1 << sizes[i]) - (1 << sizes[j]))
                    for i, j, w in mergeable
                ]
            i, j, _ = rng.choices(pool, weights=weights)[0]
            total_states += (1 << (sizes[i] + sizes[j])) - (1 << sizes[i]) - (1 << sizes[j])
            sizes[i] += sizes[j]
            del sizes[j]
            for a, p in part_of.items():
                if p == j:
                    part_of[a] = i
        loss = loss_of(part_of)
        if loss < best_loss:
            groups: dict[int, set[int]] = {}
            for a, p in part_of.items():
                groups.setdefault(p, set()).add(a)
            best = [frozenset(g) for g in groups.values()]
            best_loss = loss

    if best is None:
        raise ConfigurationError("no feasible partition found within the state budget")
    return sorted(best, key=min)


class Tuner:
    """Online semi-automatic tuning session.

    Single-writer: `analyze_query`, `feedback` and `materialize` must be
    externally serialized per session. With `fixed_partition` the candidate
    set never changes and no statistics are collected; otherwise candidates
    and their partition are re-chosen after every statement.
    """

    def __init__(
        self,
        table: TransitionCostTable,
        oracle: CostOracle,
        start: Config = EMPTY,
        config: TunerConfig | None = None,
        *,
        fixed_partition: Sequence[Iterable[int]] | None = None,
    ):
        self._table = table
        self._cache = as_caching(oracle)
        self._config = config or TunerConfig()
        self._rng = random.Random(self._config.seed)
        self._start = frozenset(start)
        if not self._start <= table.ids():
            raise CatalogError("starting configuration has ids outside the catalog")
        self._materialized = self._start
        self._position = 0
        self._fc_plus: set[int] = set()
        self._fc_minus: set[int] = set()
        self._benefit_stats: dict[int, deque[tuple[int, float]]] = {}
        self._interaction_stats: dict[tuple[int, int], deque[tuple[int, float]]] = {}
        self._universe: set[int] = set(self._start)
        self._fixed = fixed_partition is not None
        if fixed_partition is not None:
            parts = [frozenset(p) for p in fixed_partition if p]
            self._validate_partition(parts)
            self._universe |= frozenset().union(*parts) if parts else set()
        else:
            parts = [frozenset({a}) for a in sorted(self._start)]
        self._engine = PartitionedEngine.initialize(parts, self._start, table)

    # ------------------------------------------------------------- inspection

    @property
    def position(self) -> int:
        return self._position

    @property
    def partition(self) -> list[Config]:
        return sorted(self._engine.parts, key=lambda p: min(p, default=-1))

    @property
    def candidates(self) -> Config:
        return frozenset().union(*self._engine.parts) if self._engine.parts else EMPTY

    @property
    def materialized(self) -> Config:
        return self._materialized

    @property
    def universe(self) -> Config:
        return frozenset(self._universe)

    @property
    def pending_votes(self) -> tuple[Config, Config]:
        return frozenset(self._fc_plus), frozenset(self._fc_minus)

    @property
    def oracle_calls(self) -> int:
        return self._cache.calls

    @property
    def engines(self) -> list[WorkFunctionEngine]:
        return list(self._engine.engines)

    def state_count(self) -> int:
        return self._engine.state_count()

    def benefit_statistics(self, a: int) -> tuple[tuple[int, float], ...]:
        return tuple(self._benefit_stats.get(a, ()))

    def interaction_statistics(self, a: int, b: int) -> tuple[tuple[int, float], ...]:
        return tuple(self._interaction_stats.get(self._pair(a, b), ()))

    def recommend(self) -> Config:
        return self._engine.recommend()

    # -------------------------------------------------------------- operations

    def analyze_query(self, stmt: Statement) -> None:
        """Advance the session by one workload statement: refresh statistics
        and the partition (unless fixed), then update every engine. Arrival
        of a statement closes the consistency window of accumulated votes."""
        if not stmt.relevant <= self._table.ids():
            raise CatalogError("statement references ids outside the catalog")
        self._position += 1
        self._fc_plus.clear()
        self._fc_minus.clear()
        if not self._fixed:
            new_parts = self._choose_candidates(stmt)
            if set(new_parts) != set(self._engine.parts):
                self.repartition(new_parts)
        self._engine.analyze_query(stmt, self._cache)

    def feedback(self, plus: Iterable[int], minus: Iterable[int]) -> None:
        """Cast votes. The recommendation immediately contains every
        positively voted index and drops every negatively voted one; work
        values are raised so the workload must out-argue the votes before the
        engine changes its mind."""
        plus = frozenset(plus)
        minus = frozenset(minus)
        if plus & minus:
            raise ValueError("positive and negative votes must be disjoint")
        voted = plus | minus
        if not voted <= self._table.ids():
            raise CatalogError("votes reference ids outside the catalog")
        outside = voted - self.candidates
        if outside:
            self.repartition(
                list(self._engine.parts) + [frozenset({a}) for a in sorted(outside)]
            )
        for engine in self._engine.engines:
            engine.apply_votes(plus, minus)
        for a in plus:
            self._fc_plus.add(a)
            self._fc_minus.discard(a)
        for a in minus:
            self._fc_minus.add(a)
            self._fc_plus.discard(a)

    def materialize(self, create: Iterable[int], drop: Iterable[int]) -> None:
        """Record a manual change to the physical configuration; it counts as
        implicit feedback (created indices voted up, dropped ones down)."""
        create = frozenset(create)
        drop = frozenset(drop)
        if create & drop:
            raise ValueError("created and dropped sets must be disjoint")
        if not drop <= self._materialized:
            raise ValueError("cannot drop indices that are not materialized")
        if create or drop:
            self.feedback(create, drop)
        self._materialized = (self._materialized - drop) | create

    def set_materialized(self, config: Iterable[int]) -> None:
        """Out-of-band bookkeeping for harness runs where the operator adopts
        each recommendation: updates the materialized set without votes."""
        config = frozenset(config)
        if not config <= self.candidates:
            raise ValueError("materialized set must stay within the candidates")
        self._materialized = config

    def repartition(self, new_parts: Sequence[Iterable[int]]) -> None:
        """Reorganize the engines around a new partition, carrying the work
        values over so that score differences between configurations are
        preserved; indices never monitored before pay their build cost."""
        parts = [frozenset(p) for p in new_parts if p]
        self._validate_partition(parts)
        old_union = self.candidates
        current = self.recommend()
        engines = []
        for part in sorted(parts, key=min):
            cands = tuple(sorted(part))
            size = 1 << len(cands)
            masks = np.arange(size, dtype=np.int64)
            values = np.zeros(size)
            for engine in self._engine.engines:
                values += engine.gathered_values(cands)
            fresh_mask = bits.mask_of([a for a in cands if a not in old_union], cands)
            start_mask = bits.mask_of(self._start & part, cands) & fresh_mask
            create_sums = bits.subset_sums([self._table.create_cost(a) for a in cands])
            drop_sums = bits.subset_sums([self._table.drop_cost(a) for a in cands])
            values += create_sums[(masks & fresh_mask) & ~start_mask]
            values += drop_sums[start_mask & ~masks]
            engines.append(
                WorkFunctionEngine.from_state(cands, self._table, values, part & current)
            )
        self._engine = PartitionedEngine(engines)
        self._universe |= frozenset().union(*parts) if parts else set()

    # -------------------------------------------------------------- statistics

    def current_benefit(self, a: int, position: int | None = None) -> float:
        """Recency-weighted benefit rate: the best average benefit of `a`
        over any window reaching back from the current statement."""
        return self._windowed_rate(self._benefit_stats.get(a), position)

    def current_interaction(self, a: int, b: int, position: int | None = None) -> float:
        """Recency-weighted interaction rate for a pair, same windowing as
        `current_benefit`."""
        return self._windowed_rate(self._interaction_stats.get(self._pair(a, b)), position)

    def top_indices(self, pool: Iterable[int], count: int) -> Config:
        """The `count` indices of `pool` with the highest current benefit;
        indices not yet monitored are handicapped by their creation cost so
        incumbents are only evicted on clear evidence."""
        if count <= 0:
            return EMPTY
        monitored = self.candidates
        scored = []
        for a in sorted(pool):
            score = self.current_benefit(a)
            if a not in monitored:
                score -= self._table.create_cost(a)
            scored.append((-score, a))
        scored.sort()
        return frozenset(a for _, a in scored[:count])

    def partition_loss(self, parts: Sequence[Config]) -> float:
        """Summed interaction rate over index pairs split across parts; the
        approximation error a partition accepts by ignoring them."""
        owner: dict[int, int] = {}
        for i, part in enumerate(parts):
            for a in part:
                owner[a] = i
        total = 0.0
        for (a, b), _ in self._interaction_stats.items():
            if a in owner and b in owner and owner[a] != owner[b]:
                total += self.current_interaction(a, b)
        return total

    # ---------------------------------------------------------------- internals

    def _validate_partition(self, parts: Sequence[Config]) -> None:
        seen: set[int] = set()
        for part in parts:
            if part & seen:
                raise ValueError("partition parts must be disjoint")
            if len(part) > self._config.part_cap:
                raise ConfigurationError(
                    f"part of size {len(part)} exceeds the per-part cap "
                    f"{self._config.part_cap}"
                )
            seen |= part
        if not frozenset(seen) <= self._table.ids():
            raise CatalogError("partition references ids outside the catalog")
        if not self._materialized <= seen:
            raise ValueError("partition must cover every materialized index")
        if sum(1 << len(part) for part in parts) > self._config.state_cnt:
            raise ConfigurationError(
                "partition exceeds the configured state budget"
            )
        if len(seen) > self._config.idx_cnt:
            raise ConfigurationError("partition exceeds the monitored-index cap")

    def _choose_candidates(self, stmt: Statement) -> list[Config]:
        self._universe |= stmt.relevant
        self._update_statistics(stmt)
        materialized = self._materialized
        if len(materialized) > self._config.idx_cnt:
            raise ConfigurationError(
                "more materialized indices than idx_cnt allows; raise idx_cnt"
            )
        pool = frozenset(self._universe) - materialized
        picked = materialized | self.top_indices(
            pool, self._config.idx_cnt - len(materialized)
        )
        weights = {
            pair: rate
            for pair in self._interaction_stats
            if pair[0] in picked and pair[1] in picked
            and (rate := self.current_interaction(*pair)) > 0
        }
        return choose_partition(
            picked,
            weights,
            self._engine.parts,
            self._config.state_cnt,
            self._config.rand_cnt,
            self._rng,
            self._config.part_cap,
        )

    def _update_statistics(self, stmt: Statement) -> None:
        benefits, interactions = statement_statistics(
            stmt, self._cache, self._config.doi_cap
        )
        n = self._position
        hist = self._config.hist_size
        for a, best in benefits.items():
            self._benefit_stats.setdefault(a, deque(maxlen=hist)).append((n, best))
        for pair, strength in interactions.items():
            self._interaction_stats.setdefault(pair, deque(maxlen=hist)).append(
                (n, strength)
            )

    def _windowed_rate(
        self, entries: deque[tuple[int, float]] | None, position: int | None
    ) -> float:
        if not entries:
            return 0.0
        now = self._position if position is None else position
        best = 0.0
        running = 0.0
        for pos, value in reversed(entries):
            running += value
            best = max(best, running / (now - pos + 1))
        return best

    @staticmethod
    def _pair(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)
