"""Single-instance work-function recommendation engine.

Tracks, for every subset S of a fixed candidate set, the minimum cost of
having processed the workload so far and ending positioned at S. After each
statement the recommendation moves to the configuration with the lowest
score (work value plus the cost of changing back to the previous
recommendation), restricted to configurations whose own work value needed no
final transition, with deterministic preference breaking remaining ties.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import bits
from .core import (
    CapacityError,
    CachingOracle,
    Config,
    CostOracle,
    Statement,
    TransitionCostTable,
    as_caching,
)

#: 2**12 work values per instance keeps one statement update cheap; larger
#: candidate sets must be partitioned
CANDIDATE_CAP = 12


class WorkFunctionEngine:
    """Online recommendation engine over one fixed candidate set.

    Instances are single-writer: `analyze_query` and `apply_votes` mutate the
    state and must be externally serialized; distinct instances are
    independent.
    """

    def __init__(
        self,
        candidates: Sequence[int],
        table: TransitionCostTable,
        values: np.ndarray,
        recommendation: int,
    ):
        self.candidates = tuple(candidates)
        if len(self.candidates) > CANDIDATE_CAP:
            raise CapacityError(
                f"{len(self.candidates)} candidates exceed the per-instance "
                f"cap of {CANDIDATE_CAP}"
            )
        if sorted(set(self.candidates)) != list(self.candidates):
            raise ValueError("candidates must be strictly increasing ids")
        self.table = table
        size = 1 << len(self.candidates)
        if values.shape != (size,):
            raise ValueError("work values must cover every candidate subset")
        self._w = values.astype(float)
        self._rec = recommendation
        self._create = [table.create_cost(a) for a in self.candidates]
        self._drop = [table.drop_cost(a) for a in self.candidates]
        self._create_sums = bits.subset_sums(self._create)
        self._drop_sums = bits.subset_sums(self._drop)
        self._masks = np.arange(size, dtype=np.int64)
        self._pref_keys = bits.bit_reversed(len(self.candidates))

    @classmethod
    def initialize(
        cls, candidates: Iterable[int], start: Config, table: TransitionCostTable
    ) -> "WorkFunctionEngine":
        """Fresh engine: every work value is the cost of moving from the
        starting configuration, which is also the first recommendation."""
        cands = tuple(sorted(set(candidates)))
        if not start <= set(cands):
            raise ValueError("starting configuration must be within the candidates")
        size = 1 << len(cands)
        create_sums = bits.subset_sums([table.create_cost(a) for a in cands])
        drop_sums = bits.subset_sums([table.drop_cost(a) for a in cands])
        start_mask = bits.mask_of(start, cands)
        values = bits.delta_from(
            start_mask, np.arange(size, dtype=np.int64), create_sums, drop_sums
        )
        return cls(cands, table, values, start_mask)

    @classmethod
    def from_state(
        cls,
        candidates: Iterable[int],
        table: TransitionCostTable,
        values: np.ndarray,
        recommendation: Config,
    ) -> "WorkFunctionEngine":
        """Engine resumed from externally prepared work values (used when the
        candidate partition is reorganized)."""
        cands = tuple(sorted(set(candidates)))
        return cls(cands, table, values, bits.mask_of(recommendation, cands))

    def analyze_query(self, stmt: Statement, oracle: CostOracle) -> None:
        cache = as_caching(oracle)
        costs = cache.cost_vector(stmt, self.candidates)
        base = self._w + costs
        new_w = bits.relax_transitions(base, self._create, self._drop)
        # S kept its own work path exactly when no final transition improved it
        keeps_own_path = new_w == base
        scores = new_w + self._delta_to_mask(self._rec)
        best = scores.min()
        tied = np.flatnonzero((scores == best) & keeps_own_path)
        if tied.size == 0:
            raise RuntimeError(
                "no minimum-score configuration retains its own work path; "
                "the transition table must have violated the triangle inequality"
            )
        self._rec = int(tied[np.argmax(self._pref_keys[tied])])
        self._w = new_w

    def recommend(self) -> Config:
        return bits.members_of(self._rec, self.candidates)

    def apply_votes(self, plus: Config, minus: Config) -> None:
        """Force the recommendation to respect the votes, then raise work
        values just enough that every other configuration trails the new
        recommendation by at least the round-trip transition cost of making
        it vote-consistent."""
        plus_mask = bits.mask_of(plus & set(self.candidates), self.candidates)
        minus_mask = bits.mask_of(minus & set(self.candidates), self.candidates)
        self._rec = (self._rec & ~minus_mask) | plus_mask
        consistent = (self._masks & ~minus_mask) | plus_mask
        min_diff = (
            self._create_sums[consistent & ~self._masks]
            + self._drop_sums[self._masks & ~consistent]
            + self._create_sums[self._masks & ~consistent]
            + self._drop_sums[consistent & ~self._masks]
        )
        diff = self._w + self._delta_to_mask(self._rec) - self._w[self._rec]
        np.maximum(min_diff - diff, 0.0, out=min_diff)
        self._w += min_diff

    def work_value(self, config: Config) -> float:
        return float(self._w[bits.mask_of(config, self.candidates)])

    def work_values(self) -> dict[Config, float]:
        return {
            bits.members_of(m, self.candidates): float(self._w[m])
            for m in range(self._w.size)
        }

    def score(self, config: Config) -> float:
        """Work value plus the cost of changing back to the current
        recommendation; what the next statement's selection minimizes."""
        mask = bits.mask_of(config, self.candidates)
        rec = bits.members_of(self._rec, self.candidates)
        return float(self._w[mask]) + self.table.transition_cost(config, rec)

    def state_size(self) -> int:
        return self._w.size

    def gathered_values(self, candidates: Sequence[int]) -> np.ndarray:
        """Work values of (subset ∩ own candidates) for every subset of
        `candidates`, indexed by the caller's local masks. Lets a new engine
        over a reorganized part sum the contributions of the old ones."""
        own = {a: i for i, a in enumerate(self.candidates)}
        mapped = np.zeros(1 << len(candidates), dtype=np.int64)
        for i, a in enumerate(candidates):
            j = own.get(a)
            if j is not None:
                half = mapped.reshape(-1, 2, 1 << i)
                half[:, 1, :] = half[:, 0, :] + (1 << j)
        return self._w[mapped]

    def _delta_to_mask(self, target: int) -> np.ndarray:
        return bits.delta_to(target, self._masks, self._create_sums, self._drop_sums)
