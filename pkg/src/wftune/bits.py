"""Bitmask helpers for exponential state tables.

A candidate set is a sorted tuple of index ids; its subsets are addressed by
integer masks where bit i stands for the i-th id of the tuple. All tables over
"every subset of the candidates" are numpy arrays of length 2**len(candidates)
indexed by these masks.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np


def mask_of(members: Iterable[int], candidates: Sequence[int]) -> int:
    """Pack a subset of `candidates` into its local mask."""
    pos = {a: i for i, a in enumerate(candidates)}
    mask = 0
    for a in members:
        mask |= 1 << pos[a]
    return mask


def members_of(mask: int, candidates: Sequence[int]) -> frozenset[int]:
    """Unpack a local mask back into the ids it selects."""
    return frozenset(candidates[i] for i in iter_bits(mask))


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def subset_sums(values: Sequence[float]) -> np.ndarray:
    """sums[m] = sum of values[i] over the bits i set in m."""
    sums = np.zeros(1 << len(values))
    for i, v in enumerate(values):
        half = sums.reshape(-1, 2, 1 << i)
        half[:, 1, :] = half[:, 0, :] + v
    return sums


def bit_reversed(count: int) -> np.ndarray:
    """Preference keys: key[m] is m with its `count` bits mirrored.

    Among tied masks the engine prefers the one whose smallest differing bit is
    set, which is exactly the mask with the largest mirrored key.
    """
    masks = np.arange(1 << count, dtype=np.int64)
    keys = np.zeros_like(masks)
    for i in range(count):
        keys |= ((masks >> i) & 1) << (count - 1 - i)
    return keys


def relax_transitions(values: np.ndarray, create: Sequence[float], drop: Sequence[float]) -> np.ndarray:
    """g[S] = min over X of values[X] + delta(X, S), for every mask S.

    delta decomposes per index, so relaxing one bit direction at a time (add
    then remove) is exact: any X->S change is realizable by flipping each
    differing bit once, in ascending order, and extra flips only add cost.
    """
    g = values.copy()
    for i, (up, down) in enumerate(zip(create, drop)):
        half = g.reshape(-1, 2, 1 << i)
        np.minimum(half[:, 1, :], half[:, 0, :] + up, out=half[:, 1, :])
        np.minimum(half[:, 0, :], half[:, 1, :] + down, out=half[:, 0, :])
    return g


def delta_from(source: int, masks: np.ndarray, create_sums: np.ndarray, drop_sums: np.ndarray) -> np.ndarray:
    """delta(source, S) for every mask S."""
    return create_sums[masks & ~source] + drop_sums[source & ~masks]


def delta_to(target: int, masks: np.ndarray, create_sums: np.ndarray, drop_sums: np.ndarray) -> np.ndarray:
    """delta(S, target) for every mask S."""
    return create_sums[target & ~masks] + drop_sums[masks & ~target]
