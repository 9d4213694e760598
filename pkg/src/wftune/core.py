"""Domain types and exact primitives shared by every tuning algorithm.

Index configurations are frozensets of small integer ids (ids are assigned
densely at session start so the exponential tables elsewhere can treat subsets
as bitmasks). Everything in this module is a pure function over immutable
values and safe to call concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Protocol, Sequence

import numpy as np

from . import bits

Config = frozenset[int]
EMPTY: Config = frozenset()

QUERY = "query"
UPDATE = "update"

#: brute-force interaction analysis enumerates every subset of a statement's
#: relevant indices; beyond this many indices callers must shrink the pool
DOI_ENUMERATION_CAP = 14


class CatalogError(ValueError):
    """An index id is unknown to the catalog or transition-cost table."""


class EnumerationLimitError(ValueError):
    """A brute-force subset enumeration would exceed the configured cap."""


class CapacityError(ValueError):
    """A candidate set is too large for an exponential state table."""


class ConfigurationError(ValueError):
    """Tuning parameters are infeasible for the requested candidate set."""


@dataclass(frozen=True)
class Index:
    """A secondary index: dense nonnegative id plus a display name."""

    id: int
    name: str = ""

    def __post_init__(self) -> None:
        if self.id < 0:
            raise CatalogError(f"index ids must be nonnegative, got {self.id}")


@dataclass(frozen=True)
class Statement:
    """One workload statement.

    `payload` is an opaque descriptor interpreted by the cost oracle;
    `relevant` lists the indices whose presence can change this statement's
    cost, so oracles may be queried with configurations normalized to it.
    """

    position: int
    kind: str
    payload: object
    relevant: Config

    def __post_init__(self) -> None:
        if self.kind not in (QUERY, UPDATE):
            raise ValueError(f"statement kind must be query or update, got {self.kind!r}")


class CostOracle(Protocol):
    """What-if interface: estimated cost of a statement under a hypothetical
    configuration. Must be deterministic and depend only on
    ``config & stmt.relevant``."""

    def what_if_cost(self, stmt: Statement, config: Config) -> float: ...


@dataclass(frozen=True)
class FeedbackEvent:
    """A DBA vote pair arriving after statement `position` (0 = before the
    first statement); `seq` orders multiple events inside the same gap."""

    position: int
    plus: Config = EMPTY
    minus: Config = EMPTY
    seq: int = 0

    def __post_init__(self) -> None:
        if self.plus & self.minus:
            raise ValueError("positive and negative votes must be disjoint")


class TransitionCostTable:
    """Per-index creation and drop costs.

    The transition cost between configurations sums creations and drops over
    the set difference, which makes it satisfy the triangle inequality by
    construction while allowing asymmetry.
    """

    def __init__(self, create: Mapping[int, float], drop: Mapping[int, float]):
        if set(create) != set(drop):
            raise CatalogError("create and drop tables must cover the same ids")
        for a, c in create.items():
            d = drop[a]
            if not (math.isfinite(c) and math.isfinite(d)) or c < 0 or d < 0:
                raise CatalogError(f"index {a}: transition costs must be finite and >= 0")
        self._create = dict(create)
        self._drop = dict(drop)

    def ids(self) -> frozenset[int]:
        return frozenset(self._create)

    def create_cost(self, a: int) -> float:
        try:
            return self._create[a]
        except KeyError:
            raise CatalogError(f"unknown index id {a}") from None

    def drop_cost(self, a: int) -> float:
        try:
            return self._drop[a]
        except KeyError:
            raise CatalogError(f"unknown index id {a}") from None

    def transition_cost(self, frm: Config, to: Config) -> float:
        return sum(self.create_cost(a) for a in to - frm) + sum(
            self.drop_cost(a) for a in frm - to
        )

    def max_pairwise(self, universe: Iterable[int]) -> float:
        """Largest possible transition cost between subsets of `universe`:
        each index contributes whichever of create/drop is dearer."""
        return sum(max(self.create_cost(a), self.drop_cost(a)) for a in universe)


@dataclass(frozen=True)
class RecommendationSchedule:
    """The configuration adopted for each statement of a workload prefix,
    plus the configuration the session started from."""

    initial: Config
    steps: tuple[Config, ...]

    def __len__(self) -> int:
        return len(self.steps)


def benefit(stmt: Statement, added: Config, context: Config, oracle: CostOracle) -> float:
    """Cost saved by materializing `added` on top of `context`.

    Negative values are possible for updates, where extra indices cost
    maintenance instead of helping.
    """
    if added & context:
        raise ValueError("benefit requires disjoint index sets")
    return oracle.what_if_cost(stmt, context) - oracle.what_if_cost(stmt, added | context)


def degree_of_interaction(
    stmt: Statement,
    a: int,
    b: int,
    pool: Config,
    oracle: CostOracle,
    cap: int = DOI_ENUMERATION_CAP,
) -> float:
    """How much the presence of `b` can change the benefit of `a` (and vice
    versa; the measure is symmetric), maximized over every context drawn from
    `pool` that is relevant to the statement. Exact brute force."""
    if a == b:
        raise ValueError("degree of interaction needs two distinct indices")
    if a not in pool or b not in pool:
        raise ValueError("both indices must belong to the candidate pool")
    if len(pool & stmt.relevant) > cap:
        raise EnumerationLimitError(
            f"{len(pool & stmt.relevant)} relevant indices exceed the "
            f"enumeration cap of {cap}; shrink the pool"
        )
    context = sorted((pool & stmt.relevant) - {a, b})
    worst = 0.0
    for mask in range(1 << len(context)):
        x = frozenset(context[i] for i in bits.iter_bits(mask))
        # grouped symmetrically in a, b so the computed value is identical
        # when the arguments are swapped
        both = oracle.what_if_cost(stmt, x) + oracle.what_if_cost(stmt, x | {a, b})
        single = oracle.what_if_cost(stmt, x | {a}) + oracle.what_if_cost(stmt, x | {b})
        worst = max(worst, abs(both - single))
    return worst


def total_work(
    schedule: RecommendationSchedule,
    statements: Sequence[Statement],
    oracle: CostOracle,
    table: TransitionCostTable,
) -> float:
    """Query cost plus transition cost accumulated along a schedule."""
    if len(schedule) != len(statements):
        raise ValueError("schedule length must equal the workload prefix length")
    total = 0.0
    previous = schedule.initial
    for stmt, config in zip(statements, schedule.steps):
        total += table.transition_cost(previous, config)
        total += oracle.what_if_cost(stmt, config)
        previous = config
    return total


def minimal_stable_partition(
    ids: Iterable[int], interacts: Callable[[int, int], bool]
) -> list[Config]:
    """Connected components of the pairwise interaction relation, i.e. the
    finest partition whose parts never split an interacting pair."""
    members = sorted(set(ids))
    parent = {a: a for a in members}

    def root(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if interacts(a, b):
                parent[root(b)] = root(a)
    groups: dict[int, set[int]] = {}
    for a in members:
        groups.setdefault(root(a), set()).add(a)
    return [frozenset(g) for g in sorted(groups.values(), key=min)]


def stable_cost_identity_error(
    stmt: Statement, config: Config, parts: Sequence[Config], oracle: CostOracle
) -> float:
    """Absolute error of reconstructing the statement cost from per-part
    benefits; zero exactly when the partition is stable for the statement."""
    covered = frozenset().union(*parts) if parts else EMPTY
    if not config <= covered:
        raise ValueError("configuration must be covered by the partition")
    empty_cost = oracle.what_if_cost(stmt, EMPTY)
    reconstructed = empty_cost - sum(
        benefit(stmt, config & part, EMPTY, oracle) for part in parts
    )
    return abs(oracle.what_if_cost(stmt, config) - reconstructed)


def prefers(x: Config, y: Config) -> bool:
    """Deterministic preference used for every tie-break in the engines: the
    configuration containing the smallest id on which the two differ wins."""
    differing = x ^ y
    return bool(differing) and min(differing) in x


class CachingOracle:
    """Memoizes what-if calls for the statement currently being analyzed.

    Configurations are normalized to the statement's relevant set before
    lookup, so the 2**|C| evaluations of a work-function update collapse to at
    most 2**|relevant ∩ C| true optimizer calls, shared across engine
    instances. `calls` counts the underlying oracle invocations.
    """

    def __init__(self, oracle: CostOracle):
        self._oracle = oracle
        self._stmt: Statement | None = None
        self._costs: dict[Config, float] = {}
        self.calls = 0

    def what_if_cost(self, stmt: Statement, config: Config) -> float:
        if stmt is not self._stmt:
            self._stmt = stmt
            self._costs = {}
        key = config & stmt.relevant
        hit = self._costs.get(key)
        if hit is None:
            hit = self._oracle.what_if_cost(stmt, key)
            self._costs[key] = hit
            self.calls += 1
        return hit

    def cost_vector(self, stmt: Statement, candidates: Sequence[int]) -> np.ndarray:
        """Costs for every subset of `candidates`, indexed by local mask."""
        count = len(candidates)
        relevant_bits = [i for i in range(count) if candidates[i] in stmt.relevant]
        packed = np.zeros(1 << count, dtype=np.int64)
        for rank, i in enumerate(relevant_bits):
            half = packed.reshape(-1, 2, 1 << i)
            half[:, 1, :] = half[:, 0, :] + (1 << rank)
        table = np.empty(1 << len(relevant_bits))
        for dense in range(table.size):
            subset = frozenset(
                candidates[relevant_bits[j]] for j in bits.iter_bits(dense)
            )
            table[dense] = self.what_if_cost(stmt, subset)
        return table[packed]


def as_caching(oracle: CostOracle) -> CachingOracle:
    return oracle if isinstance(oracle, CachingOracle) else CachingOracle(oracle)
