"""Incremental execution of one tuning session over a workload.

The engine behind both the experiment harness and the HTTP service: it steps
the tuner one statement at a time, charges the adopted configuration for each
statement, compares the running total against the offline optimum computed on
the fixed experimental candidate space, and keeps a replayable event log.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import (
    CachingOracle,
    Config,
    EMPTY,
    FeedbackEvent,
)
from .offline import OptResult, optimum_over_partition
from .synthetic import Workload
from .tuner import Tuner, TunerConfig


@dataclass(frozen=True)
class MetricsRow:
    """Cumulative performance after statement `n`: the algorithm's total work,
    the offline optimum's total work, their ratio (optimum over algorithm, so
    1.0 means optimal), the what-if calls spent by the tuner so far, and the
    wall-clock milliseconds of tuner computation."""

    n: int
    algo: str
    tot_work: float
    opt_tot_work: float
    ratio: float
    oracle_calls: int
    wall_ms: float


class SessionEngine:
    """Single-writer driver for one tuner over one workload.

    The adopted configuration charged for each statement is the tuner's fresh
    recommendation, except in leased mode where the operator only accepts the
    recommendation every `lease` statements (implicitly voting for the diff)
    and the materialized set is charged in between.
    """

    def __init__(
        self,
        workload: Workload,
        config: TunerConfig | None = None,
        *,
        label: str = "wfit",
        start: Config = EMPTY,
        partition_mode: str = "fixed",
        fixed_parts: Sequence[Config] | None = None,
        opt_parts: Sequence[Config] | None = None,
        opt_result: OptResult | None = None,
        lease: int | None = None,
        adopt_materialized: bool = True,
    ):
        if partition_mode not in ("fixed", "auto"):
            raise ValueError("partition_mode must be fixed or auto")
        if partition_mode == "fixed" and fixed_parts is None:
            raise ValueError("fixed mode needs the experimental partition")
        if lease is not None and lease < 1:
            raise ValueError("lease period must be at least 1 statement")
        self.workload = workload
        self.statements = workload.statements
        self.catalog = workload.catalog
        self.table = workload.catalog.transition_table()
        self.config = config or TunerConfig()
        self.label = label
        self.start = frozenset(start)
        self.lease = lease
        self._adopt_materialized = adopt_materialized and partition_mode == "auto"
        self.tuner = Tuner(
            self.table,
            self.catalog,
            self.start,
            self.config,
            fixed_partition=fixed_parts if partition_mode == "fixed" else None,
        )
        self._opt_parts = list(opt_parts if opt_parts is not None else fixed_parts or [])
        self._opt_result = opt_result
        self.cursor = 0
        self.rows: list[MetricsRow] = []
        self.events: list[dict] = []
        self._adopted = self.start
        self._tot_work = 0.0
        self._wall_ms = 0.0

    # ------------------------------------------------------------------ state

    @property
    def length(self) -> int:
        return len(self.statements)

    @property
    def exhausted(self) -> bool:
        return self.cursor >= self.length

    @property
    def opt_result(self) -> OptResult:
        """Offline optimum over the experimental candidate space (computed on
        demand; its oracle traffic is not billed to the tuner)."""
        if self._opt_result is None:
            self._opt_result = optimum_over_partition(
                self.statements,
                self._opt_parts,
                self.start,
                CachingOracle(self.catalog),
                self.table,
            )
        return self._opt_result

    def recommend(self) -> Config:
        return self.tuner.recommend()

    # ------------------------------------------------------------- transitions

    def step(self) -> MetricsRow:
        """Process the next statement and account for it."""
        if self.exhausted:
            raise IndexError("workload exhausted")
        stmt = self.statements[self.cursor]
        began = time.perf_counter()
        self.tuner.analyze_query(stmt)
        position = self.cursor + 1
        if self.lease is not None and position % self.lease == 0:
            recommendation = self.tuner.recommend()
            held = self.tuner.materialized
            self.tuner.materialize(recommendation - held, held - recommendation)
        self._wall_ms += (time.perf_counter() - began) * 1000.0
        self.cursor = position
        if self.lease is not None:
            adopted = self.tuner.materialized
        else:
            adopted = self.tuner.recommend()
            if self._adopt_materialized:
                self.tuner.set_materialized(adopted)
        self._tot_work += self.table.transition_cost(self._adopted, adopted)
        self._tot_work += self.catalog.what_if_cost(stmt, adopted)
        self._adopted = adopted
        optimum_now = self.opt_result.per_prefix[self.cursor]
        row = MetricsRow(
            n=self.cursor,
            algo=self.label,
            tot_work=self._tot_work,
            opt_tot_work=optimum_now,
            ratio=optimum_now / self._tot_work if self._tot_work else 1.0,
            oracle_calls=self.tuner.oracle_calls,
            wall_ms=self._wall_ms,
        )
        self.rows.append(row)
        self.events.append({"kind": "statement", "position": self.cursor})
        return row

    def feedback(self, plus: Iterable[int], minus: Iterable[int]) -> Config:
        plus = frozenset(plus)
        minus = frozenset(minus)
        began = time.perf_counter()
        self.tuner.feedback(plus, minus)
        self._wall_ms += (time.perf_counter() - began) * 1000.0
        self.events.append(
            {
                "kind": "feedback",
                "position": self.cursor,
                "plus": sorted(plus),
                "minus": sorted(minus),
            }
        )
        return self.tuner.recommend()

    def materialize(self, create: Iterable[int], drop: Iterable[int]) -> Config:
        create = frozenset(create)
        drop = frozenset(drop)
        self.tuner.materialize(create, drop)
        self.events.append(
            {
                "kind": "materialize",
                "position": self.cursor,
                "create": sorted(create),
                "drop": sorted(drop),
            }
        )
        return self.tuner.recommend()

    def run(
        self, votes: Mapping[int, Sequence[FeedbackEvent]] | None = None
    ) -> list[MetricsRow]:
        """Drive the whole workload, injecting scheduled feedback events after
        the statement they are positioned at (position 0 fires first)."""
        votes = votes or {}
        for event in sorted(votes.get(0, ()), key=lambda e: e.seq):
            self.feedback(event.plus, event.minus)
        while not self.exhausted:
            self.step()
            for event in sorted(votes.get(self.cursor, ()), key=lambda e: e.seq):
                self.feedback(event.plus, event.minus)
        return self.rows


def replay_events(
    workload: Workload,
    events: Sequence[Mapping],
    config: TunerConfig | None = None,
    **engine_kwargs,
) -> Config:
    """Re-run a session's event log through a fresh engine and return the
    final recommendation; sessions are deterministic so this must reproduce
    the live outcome exactly."""
    engine = SessionEngine(workload, config, **engine_kwargs)
    for event in events:
        kind = event["kind"]
        if kind == "statement":
            engine.step()
        elif kind == "feedback":
            engine.feedback(event["plus"], event["minus"])
        elif kind == "materialize":
            engine.materialize(event["create"], event["drop"])
        else:
            raise ValueError(f"unknown event kind {kind!r}")
    return engine.recommend()
