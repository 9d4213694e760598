"""Divide-and-conquer wrapper: one work-function engine per partition part.

When the partition is stable (per-part benefits add exactly), the union of
per-part recommendations matches what a single joint engine over all
candidates would pick, at a fraction of the bookkeeping.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .core import Config, CostOracle, Statement, TransitionCostTable, as_caching
from .wfa import WorkFunctionEngine


class PartitionedEngine:
    """Runs independent work-function engines over disjoint candidate parts;
    recommendations are the union of the per-part picks. Engines share one
    per-statement oracle cache during `analyze_query`."""

    def __init__(self, engines: Sequence[WorkFunctionEngine]):
        self.engines = list(engines)
        seen: set[int] = set()
        for engine in self.engines:
            part = set(engine.candidates)
            if part & seen:
                raise ValueError("partition parts must be disjoint")
            seen |= part

    @classmethod
    def initialize(
        cls,
        parts: Iterable[Iterable[int]],
        start: Config,
        table: TransitionCostTable,
    ) -> "PartitionedEngine":
        return cls(
            [
                WorkFunctionEngine.initialize(part, start & frozenset(part), table)
                for part in parts
            ]
        )

    @property
    def parts(self) -> list[Config]:
        return [frozenset(engine.candidates) for engine in self.engines]

    def analyze_query(self, stmt: Statement, oracle: CostOracle) -> None:
        cache = as_caching(oracle)
        for engine in self.engines:
            engine.analyze_query(stmt, cache)

    def recommend(self) -> Config:
        picked: set[int] = set()
        for engine in self.engines:
            picked |= engine.recommend()
        return frozenset(picked)

    def state_count(self) -> int:
        return int(sum(engine.state_size() for engine in self.engines))

    def joint_work_value(self, config: Config, empty_cost_total: float) -> float:
        """Work value the joint engine over all parts would hold for `config`:
        per-part values add up to it, minus the shared empty-configuration
        processing cost counted once per extra part."""
        total = sum(
            engine.work_value(config & frozenset(engine.candidates))
            for engine in self.engines
        )
        return total - (len(self.engines) - 1) * empty_cost_total
