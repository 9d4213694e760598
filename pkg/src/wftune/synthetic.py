"""Deterministic synthetic what-if cost model and phased workload generator.

The cost model is table-driven: indices belong to disjoint interaction
groups, each (template, group) pair declares an exact benefit for every
subset of the group, and update templates add per-index maintenance
penalties. Costs therefore decompose exactly across groups, every benefit
and interaction value is computable by brute force, and all outputs are
integer-valued floats so downstream exact comparisons never hit rounding.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import cycle, islice
from typing import Iterable, Mapping, Sequence

from . import bits
from .core import (
    CatalogError,
    Config,
    EMPTY,
    Index,
    QUERY,
    UPDATE,
    Statement,
    TransitionCostTable,
)


@dataclass(frozen=True)
class WorkloadSpec:
    """Shape of a generated workload: consecutive phases of equal length,
    each phase focusing on its own slice of the index groups."""

    phases: int = 8
    statements_per_phase: int = 200
    update_ratio: float | tuple[float, ...] = (0.1, 0.3)
    overlap: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.phases < 1 or self.statements_per_phase < 1:
            raise ValueError("phases and statements_per_phase must be positive")
        for r in self.ratios():
            if not 0.0 <= r <= 1.0:
                raise ValueError("update ratios must lie in [0, 1]")

    def ratios(self) -> tuple[float, ...]:
        """Per-phase update fraction; scalar and short tuples cycle."""
        raw = self.update_ratio
        if isinstance(raw, (int, float)):
            return (float(raw),) * self.phases
        return tuple(islice(cycle(float(r) for r in raw), self.phases))

    @property
    def length(self) -> int:
        return self.phases * self.statements_per_phase


@dataclass(frozen=True)
class CatalogSpec:
    """Sizing and cost ranges for a generated catalog. The defaults yield a
    universe of roughly 300 indices with about 40 relevant per phase."""

    groups: int = 89
    group_sizes: tuple[int, ...] | None = None
    size_range: tuple[int, int] = (2, 5)
    focus_width: int = 12
    query_templates_per_phase: int = 8
    update_templates_per_phase: int = 4
    create_range: tuple[int, int] = (30, 120)
    drop_range: tuple[int, int] = (0, 8)
    benefit_range: tuple[int, int] = (6, 40)
    bonus_range: tuple[int, int] = (4, 24)
    margin_range: tuple[int, int] = (10, 60)
    penalty_range: tuple[int, int] = (3, 15)
    #: how index benefits inside a group combine; repetition weights the draw.
    #: "additive" groups never interact, "synergy" earns a joint bonus,
    #: "alternative" models redundant access paths (best index wins)
    styles: tuple[str, ...] = ("additive", "synergy", "alternative")

    def __post_init__(self) -> None:
        if self.size_range[0] < 1 or self.size_range[1] > 5:
            raise ValueError("group sizes must stay within 1..5")
        if self.group_sizes and (min(self.group_sizes) < 1 or max(self.group_sizes) > 5):
            raise ValueError("group sizes must stay within 1..5")


@dataclass
class StatementTemplate:
    key: str
    kind: str
    base: float
    benefits: dict[int, dict[Config, float]]  # group position -> subset table
    penalties: dict[int, float]  # index id -> maintenance cost
    relevant: Config


class SyntheticCatalog:
    """A what-if cost oracle built to make per-group benefits add exactly.

    cost(q, X) = base(q) - sum over groups of benefit(q, X ∩ group)
                 + sum of penalties over materialized indices.
    Bases exceed the largest possible total benefit, so the nonnegativity
    clamp never fires on generated templates. Immutable after construction.
    """

    def __init__(
        self,
        indices: Sequence[Index],
        create: Mapping[int, float],
        drop: Mapping[int, float],
        groups: Sequence[Iterable[int]],
        templates: Sequence[StatementTemplate],
        phase_pools: Sequence[tuple[Sequence[str], Sequence[str]]] = (),
    ):
        self.indices = tuple(indices)
        self._names = {ix.id: ix.name for ix in self.indices}
        self._universe = frozenset(ix.id for ix in self.indices)
        self.groups = tuple(frozenset(g) for g in groups)
        self._table = TransitionCostTable(create, drop)
        self.templates = {tpl.key: tpl for tpl in templates}
        self.phase_pools = tuple(
            (tuple(queries), tuple(updates)) for queries, updates in phase_pools
        )
        self._validate()

    def _validate(self) -> None:
        seen: set[int] = set()
        for group in self.groups:
            if group & seen:
                raise ValueError("interaction groups must be disjoint")
            if not group <= self._universe:
                raise CatalogError("groups reference unknown indices")
            seen |= group
        for tpl in self.templates.values():
            for gi, table in tpl.benefits.items():
                group = self.groups[gi]
                if table.get(EMPTY, 0.0) != 0.0:
                    raise ValueError(f"{tpl.key}: empty-subset benefit must be 0")
                for subset, value in table.items():
                    if not subset <= group:
                        raise ValueError(f"{tpl.key}: benefit subset outside its group")
                    if tpl.kind == QUERY:
                        for a in group - subset:
                            if table[subset | {a}] < value:
                                raise ValueError(
                                    f"{tpl.key}: query benefits must be monotone"
                                )

    @property
    def universe(self) -> Config:
        return self._universe

    def name_of(self, a: int) -> str:
        return self._names.get(a, str(a))

    def transition_table(self) -> TransitionCostTable:
        return self._table

    def what_if_cost(self, stmt: Statement, config: Config) -> float:
        if not config <= self._universe:
            raise CatalogError(f"unknown indices {sorted(config - self._universe)}")
        tpl = self.templates.get(stmt.payload)
        if tpl is None:
            raise CatalogError(f"unknown statement template {stmt.payload!r}")
        cost = tpl.base
        for gi, table in tpl.benefits.items():
            cost -= table[config & self.groups[gi]]
        for a, penalty in tpl.penalties.items():
            if a in config:
                cost += penalty
        return max(cost, 0.0)

    def extract_indices(self, stmt: Statement) -> Config:
        """Indices whose presence can change this statement's cost (the
        generator records ground truth, standing in for optimizer support)."""
        tpl = self.templates.get(stmt.payload)
        if tpl is None:
            raise CatalogError(f"unknown statement template {stmt.payload!r}")
        return tpl.relevant

    def statement(self, position: int, key: str) -> Statement:
        tpl = self.templates[key]
        return Statement(position=position, kind=tpl.kind, payload=key, relevant=tpl.relevant)

    def to_json(self) -> dict:
        return {
            "indices": [
                {
                    "id": ix.id,
                    "name": ix.name,
                    "create": self._table.create_cost(ix.id),
                    "drop": self._table.drop_cost(ix.id),
                }
                for ix in self.indices
            ],
            "groups": [sorted(g) for g in self.groups],
            "templates": [
                {
                    "key": tpl.key,
                    "kind": tpl.kind,
                    "base": tpl.base,
                    "benefits": {
                        str(gi): [[sorted(s), v] for s, v in sorted(table.items(), key=lambda kv: sorted(kv[0]))]
                        for gi, table in tpl.benefits.items()
                    },
                    "penalties": {str(a): v for a, v in tpl.penalties.items()},
                }
                for tpl in self.templates.values()
            ],
            "phase_pools": [[list(q), list(u)] for q, u in self.phase_pools],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SyntheticCatalog":
        indices = [Index(int(e["id"]), e.get("name", "")) for e in doc["indices"]]
        create = {int(e["id"]): float(e["create"]) for e in doc["indices"]}
        drop = {int(e["id"]): float(e["drop"]) for e in doc["indices"]}
        groups = [frozenset(int(a) for a in g) for g in doc["groups"]]
        templates = []
        for entry in doc["templates"]:
            benefits = {
                int(gi): {frozenset(int(a) for a in s): float(v) for s, v in table}
                for gi, table in entry["benefits"].items()
            }
            penalties = {int(a): float(v) for a, v in entry.get("penalties", {}).items()}
            relevant = frozenset().union(
                *(groups[gi] for gi in benefits), penalties
            ) if benefits or penalties else EMPTY
            templates.append(
                StatementTemplate(
                    key=entry["key"],
                    kind=entry["kind"],
                    base=float(entry["base"]),
                    benefits=benefits,
                    penalties=penalties,
                    relevant=relevant,
                )
            )
        pools = [(tuple(q), tuple(u)) for q, u in doc.get("phase_pools", [])]
        return cls(indices, create, drop, groups, templates, pools)


@dataclass
class Workload:
    catalog: SyntheticCatalog
    statements: tuple[Statement, ...]
    spec: WorkloadSpec


def _subset_tables(
    rng: random.Random, group: Config, style: str, spec: CatalogSpec, scale: int = 1
) -> dict[Config, float]:
    ids = sorted(group)
    singles = {a: max(rng.randint(*spec.benefit_range) // scale, 1) for a in ids}
    bonus = rng.randint(*spec.bonus_range)
    table: dict[Config, float] = {}
    for mask in range(1 << len(ids)):
        subset = frozenset(ids[i] for i in bits.iter_bits(mask))
        if style == "alternative":
            # redundant access paths: the best single index wins
            value = max((singles[a] for a in subset), default=0)
        else:
            value = sum(singles[a] for a in subset)
            if style == "synergy" and len(subset) >= 2:
                value += bonus
        table[subset] = float(value)
    return table


def _focus_windows(spec: WorkloadSpec, group_count: int, width: int) -> list[list[int]]:
    width = min(width, group_count)
    stride = max(width - 1, 1) if spec.overlap else width
    windows = []
    for phase in range(spec.phases):
        offset = (phase * stride) % group_count
        windows.append([(offset + j) % group_count for j in range(width)])
    return windows


def build_catalog(spec: WorkloadSpec, cspec: CatalogSpec | None = None) -> SyntheticCatalog:
    cspec = cspec or CatalogSpec()
    rng = random.Random(f"{spec.seed}:catalog")
    sizes = list(cspec.group_sizes or ())
    while len(sizes) < cspec.groups:
        sizes.append(rng.randint(*cspec.size_range))
    sizes = sizes[: cspec.groups]

    indices: list[Index] = []
    groups: list[frozenset[int]] = []
    create: dict[int, float] = {}
    drop: dict[int, float] = {}
    next_id = 0
    for gi, size in enumerate(sizes):
        members = []
        for j in range(size):
            indices.append(Index(next_id, f"ix_{gi}_{j}"))
            create[next_id] = float(rng.randint(*cspec.create_range))
            drop[next_id] = float(rng.randint(*cspec.drop_range))
            members.append(next_id)
            next_id += 1
        groups.append(frozenset(members))

    windows = _focus_windows(spec, len(groups), cspec.focus_width)
    templates: list[StatementTemplate] = []
    pools: list[tuple[list[str], list[str]]] = []
    styles = cspec.styles
    for phase, focus in enumerate(windows):
        queries: list[str] = []
        updates: list[str] = []
        dealt = 0  # deal every focus group to some template so none stays cold

        def touch(count: int) -> list[int]:
            nonlocal dealt
            primary = focus[dealt % len(focus)]
            dealt += 1
            others = [g for g in focus if g != primary]
            return [primary, *rng.sample(others, min(count - 1, len(others)))]

        for t in range(cspec.query_templates_per_phase):
            touched = touch(rng.randint(1, min(3, len(focus))))
            benefits = {
                gi: _subset_tables(rng, groups[gi], rng.choice(styles), cspec)
                for gi in touched
            }
            base = sum(max(tbl.values()) for tbl in benefits.values())
            base += rng.randint(*cspec.margin_range)
            key = f"q{phase}.{t}"
            templates.append(
                StatementTemplate(
                    key=key,
                    kind=QUERY,
                    base=float(base),
                    benefits=benefits,
                    penalties={},
                    relevant=frozenset().union(*(groups[gi] for gi in touched)),
                )
            )
            queries.append(key)
        for t in range(cspec.update_templates_per_phase):
            touched = touch(rng.randint(1, min(2, len(focus))))
            penalties = {
                a: float(rng.randint(*cspec.penalty_range))
                for gi in touched
                for a in sorted(groups[gi])
            }
            benefits = {}
            if rng.random() < 0.5:
                gi = touched[0]
                benefits[gi] = _subset_tables(rng, groups[gi], "additive", cspec, scale=2)
            base = sum(max(tbl.values()) for tbl in benefits.values())
            base += rng.randint(*cspec.margin_range)
            key = f"u{phase}.{t}"
            templates.append(
                StatementTemplate(
                    key=key,
                    kind=UPDATE,
                    base=float(base),
                    benefits=benefits,
                    penalties=penalties,
                    relevant=frozenset().union(*(groups[gi] for gi in touched), penalties),
                )
            )
            updates.append(key)
        pools.append((queries, updates))

    return SyntheticCatalog(indices, create, drop, groups, templates, pools)


def roll_statements(catalog: SyntheticCatalog, spec: WorkloadSpec) -> list[Statement]:
    if len(catalog.phase_pools) < spec.phases:
        raise ValueError("catalog does not carry template pools for every phase")
    rng = random.Random(f"{spec.seed}:stream")
    ratios = spec.ratios()
    statements: list[Statement] = []
    position = 0
    for phase in range(spec.phases):
        queries, updates = catalog.phase_pools[phase]
        for _ in range(spec.statements_per_phase):
            position += 1
            pick_update = bool(updates) and rng.random() < ratios[phase]
            key = rng.choice(updates if pick_update else queries)
            statements.append(catalog.statement(position, key))
    return statements


def generate_workload(spec: WorkloadSpec, cspec: CatalogSpec | None = None) -> Workload:
    """Deterministic catalog plus statement stream for a given spec/seed."""
    catalog = build_catalog(spec, cspec)
    return Workload(catalog, tuple(roll_statements(catalog, spec)), spec)


def workload_to_json(workload: Workload) -> dict:
    spec = workload.spec
    return {
        "catalog": workload.catalog.to_json(),
        "spec": {
            "phases": spec.phases,
            "statements_per_phase": spec.statements_per_phase,
            "update_ratio": list(spec.ratios()),
            "overlap": spec.overlap,
            "seed": spec.seed,
        },
    }


def workload_from_json(doc: dict) -> Workload:
    raw = doc["spec"]
    ratio = raw.get("update_ratio", 0.0)
    spec = WorkloadSpec(
        phases=int(raw["phases"]),
        statements_per_phase=int(raw["statements_per_phase"]),
        update_ratio=tuple(ratio) if isinstance(ratio, list) else float(ratio),
        overlap=bool(raw.get("overlap", True)),
        seed=int(raw.get("seed", 0)),
    )
    catalog = SyntheticCatalog.from_json(doc["catalog"])
    return Workload(catalog, tuple(roll_statements(catalog, spec)), spec)


def load_workload(path: str) -> Workload:
    with open(path, "r", encoding="utf-8") as handle:
        return workload_from_json(json.load(handle))


def save_workload(workload: Workload, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(workload_to_json(workload), handle, indent=1, sort_keys=True)
