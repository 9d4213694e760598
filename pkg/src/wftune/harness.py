"""Experiment harness: desk-scale scenario runs with CSV metrics.

Scenarios replay a phased synthetic workload through the tuner under
different operator models (no feedback, prescient or adversarial votes,
delayed acceptance, independence assumption, automatic partition
maintenance) and measure total work against the offline optimum computed on
a fixed experimental candidate space.
"""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    CachingOracle,
    Config,
    ConfigurationError,
    EMPTY,
    FeedbackEvent,
    TransitionCostTable,
)
from .offline import optimum_over_partition, synthesize_feedback
from .session import MetricsRow, SessionEngine
from .synthetic import CatalogSpec, Workload, WorkloadSpec, generate_workload, load_workload
from .tuner import TunerConfig, choose_partition, statement_statistics

SCENARIO_NAMES = (
    "baseline",
    "wfit-ind",
    "good-feedback",
    "bad-feedback",
    "lagged",
    "auto-partition",
)

#: desk-scale catalog: 24 indices in 8 groups keeps the exact optimum cheap;
#: synergy-heavy style mix with strong joint bonuses makes the independence
#: assumption visibly costly
DESK_CATALOG = CatalogSpec(
    groups=8,
    group_sizes=(4, 3, 3, 3, 3, 3, 3, 2),
    focus_width=3,
    query_templates_per_phase=6,
    update_templates_per_phase=3,
    bonus_range=(30, 80),
    styles=("synergy", "synergy", "alternative", "additive"),
)

CSV_HEADER = ("n", "algo", "tot_work", "opt_tot_work", "ratio", "oracle_calls", "wall_ms")


@dataclass(frozen=True)
class Scenario:
    """One harness run. `lag` only applies to the lagged scenario; the
    auto-partition scenario implies automatic partition maintenance."""

    name: str
    lag: int = 1
    phases: int = 8
    per_phase: int = 50
    seed: int = 0
    idx_cnt: int = 40
    state_cnt: int = 128
    hist_size: int = 100
    rand_cnt: int = 100
    partition: str = "fixed"
    workload_file: str | None = None

    def __post_init__(self) -> None:
        if self.name not in SCENARIO_NAMES:
            raise ConfigurationError(
                f"unknown scenario {self.name!r}; pick one of {', '.join(SCENARIO_NAMES)}"
            )
        if self.lag < 1:
            raise ConfigurationError("lag must be at least 1 statement")
        if self.partition not in ("fixed", "auto"):
            raise ConfigurationError("partition must be fixed or auto")

    @property
    def partition_mode(self) -> str:
        return "auto" if self.name == "auto-partition" or self.partition == "auto" else "fixed"

    @property
    def label(self) -> str:
        return f"lagged-{self.lag}" if self.name == "lagged" else self.name

    def tuner_config(self) -> TunerConfig:
        return TunerConfig(
            idx_cnt=self.idx_cnt,
            state_cnt=self.state_cnt,
            hist_size=self.hist_size,
            rand_cnt=self.rand_cnt,
            seed=self.seed,
        )

    def workload_spec(self) -> WorkloadSpec:
        return WorkloadSpec(
            phases=self.phases, statements_per_phase=self.per_phase, seed=self.seed
        )


def scenario_workload(scenario: Scenario) -> Workload:
    if scenario.workload_file:
        return load_workload(scenario.workload_file)
    return generate_workload(scenario.workload_spec(), DESK_CATALOG)


def whole_workload_averages(
    statements, oracle: CachingOracle, cap: int
) -> tuple[dict[int, float], dict[tuple[int, int], float]]:
    """Benefit and interaction strength averaged over the entire workload
    instead of a recent window; the offline criterion for the fixed
    experimental candidate space."""
    benefit_sums: dict[int, float] = {}
    interaction_sums: dict[tuple[int, int], float] = {}
    for stmt in statements:
        benefits, interactions = statement_statistics(stmt, oracle, cap)
        for a, value in benefits.items():
            benefit_sums[a] = benefit_sums.get(a, 0.0) + value
        for pair, value in interactions.items():
            interaction_sums[pair] = interaction_sums.get(pair, 0.0) + value
    count = max(len(statements), 1)
    return (
        {a: total / count for a, total in benefit_sums.items()},
        {pair: total / count for pair, total in interaction_sums.items()},
    )


def offline_partition(
    statements,
    oracle: CachingOracle,
    table: TransitionCostTable,
    start: Config,
    config: TunerConfig,
) -> list[Config]:
    """The fixed experimental partition: pick the indices with the best
    whole-workload average benefit (newcomers handicapped by their creation
    cost), then partition them around the average interaction strengths."""
    averages, interactions = whole_workload_averages(statements, oracle, config.doi_cap)
    scored = sorted(
        ((-(value - table.create_cost(a)), a) for a, value in averages.items())
    )
    picked = set(start)
    for _, a in scored:
        if len(picked) >= config.idx_cnt:
            break
        picked.add(a)
    weights = {
        pair: value
        for pair, value in interactions.items()
        if pair[0] in picked and pair[1] in picked
    }
    rng = random.Random(config.seed)
    return choose_partition(
        picked, weights, [], config.state_cnt, config.rand_cnt, rng, config.part_cap
    )


def _grouped_by_position(events: Sequence[FeedbackEvent]) -> dict[int, list[FeedbackEvent]]:
    grouped: dict[int, list[FeedbackEvent]] = {}
    for event in events:
        grouped.setdefault(event.position, []).append(event)
    return grouped


def run_scenario(scenario: Scenario, workload: Workload | None = None) -> list[MetricsRow]:
    """Execute one scenario end to end and return its per-statement rows."""
    workload = workload or scenario_workload(scenario)
    statements = workload.statements
    table = workload.catalog.transition_table()
    config = scenario.tuner_config()
    start: Config = EMPTY

    setup_oracle = CachingOracle(workload.catalog)
    experimental = offline_partition(statements, setup_oracle, table, start, config)
    opt = optimum_over_partition(statements, experimental, start, setup_oracle, table)

    votes: Mapping[int, Sequence[FeedbackEvent]] | None = None
    if scenario.name == "good-feedback":
        votes = _grouped_by_position(synthesize_feedback(opt.schedule, "good"))
    elif scenario.name == "bad-feedback":
        votes = _grouped_by_position(synthesize_feedback(opt.schedule, "bad"))

    if scenario.partition_mode == "auto":
        fixed_parts = None
    elif scenario.name == "wfit-ind":
        fixed_parts = [
            frozenset({a}) for part in experimental for a in sorted(part)
        ]
    else:
        fixed_parts = experimental

    engine = SessionEngine(
        workload,
        config,
        label=scenario.label,
        start=start,
        partition_mode=scenario.partition_mode,
        fixed_parts=fixed_parts,
        opt_parts=experimental,
        opt_result=opt,
        lease=scenario.lag if scenario.name == "lagged" else None,
    )
    return engine.run(votes)


def write_csv(rows: Sequence[MetricsRow], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.n,
                    row.algo,
                    repr(row.tot_work),
                    repr(row.opt_tot_work),
                    repr(row.ratio),
                    row.oracle_calls,
                    repr(row.wall_ms),
                ]
            )


def read_csv(path: str) -> list[MetricsRow]:
    with open(path, "r", newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected metrics header {header!r}")
        return [
            MetricsRow(
                n=int(n),
                algo=algo,
                tot_work=float(tot),
                opt_tot_work=float(opt),
                ratio=float(ratio),
                oracle_calls=int(calls),
                wall_ms=float(wall),
            )
            for n, algo, tot, opt, ratio, calls, wall in reader
        ]
