"""Empirical pattern statistics.

All U-statistics are computed from pattern counts in O(n + d!) time.  This is
exact because the kernel depends on two windows only through their patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from . import patterns as pt
from .errors import DimensionMismatch, NotAProbabilityVector, TooFewWindows
from .partitions import Partition


@dataclass(frozen=True)
class PatternCounts:
    d: int
    counts: np.ndarray
    n: int

    @classmethod
    def from_ids(cls, ids: np.ndarray, d: int) -> "PatternCounts":
        ids = np.asarray(ids, dtype=np.int64)
        counts = np.bincount(ids, minlength=factorial(d)).astype(np.int64)
        if counts.size != factorial(d):
            raise DimensionMismatch(f"pattern ids exceed 0..{factorial(d) - 1}")
        counts.setflags(write=False)
        return cls(d, counts, int(ids.size))

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.n


@dataclass(frozen=True)
class GroupedFrequencies:
    partition: Partition
    group_probs: np.ndarray
    per_pattern_symmetrized: np.ndarray

    @property
    def group_means(self) -> np.ndarray:
        """p-hat_i = p-hat(G_i) / |G_i|, the common symmetrized value in group i."""
        return self.group_probs / self.partition.sizes


def count_patterns(series: Sequence[float], d: int) -> PatternCounts:
    return PatternCounts.from_ids(pt.pattern_sequence(series, d), d)


def _check(counts: PatternCounts, partition: Partition | None = None, min_n: int = 2) -> None:
    if counts.n < min_n:
        raise TooFewWindows(f"need at least {min_n} windows, got {counts.n}")
    if partition is not None and partition.d != counts.d:
        raise DimensionMismatch(f"partition has d={partition.d} but counts have d={counts.d}")


def group_totals(values: np.ndarray, partition: Partition) -> np.ndarray:
    """Sum ``values`` (indexed by pattern id) within each group."""
    return np.bincount(partition.group_index, weights=np.asarray(values, dtype=float), minlength=partition.m)


def grouped_frequencies(counts: PatternCounts, partition: Partition) -> GroupedFrequencies:
    _check(counts, partition, min_n=1)
    group_probs = group_totals(counts.counts, partition) / counts.n
    per_pattern = (group_probs / partition.sizes)[partition.group_index]
    return GroupedFrequencies(partition, group_probs, per_pattern)


def symbolic_correlation(counts: PatternCounts) -> float:
    """Fraction of unordered window pairs sharing a pattern."""
    _check(counts)
    c = counts.counts.astype(float)
    n = counts.n
    return float(np.sum(c * (c - 1)) / (n * (n - 1)))


def d2_statistic(counts: PatternCounts, partition: Partition) -> float:
    """Sum of squared symmetrized frequencies minus the symbolic correlation integral."""
    _check(counts, partition)
    sym = grouped_frequencies(counts, partition).per_pattern_symmetrized
    return float(np.sum(sym**2) - symbolic_correlation(counts))


def kernel_matrix(partition: Partition) -> np.ndarray:
    """The kernel h as a d! x d! matrix indexed by pattern ids."""
    gi = partition.group_index
    same = gi[:, None] == gi[None, :]
    h = np.where(same, 1.0 / partition.sizes[gi][:, None], 0.0)
    h -= np.eye(partition.size)
    return h


def kernel_h(x: int, y: int, partition: Partition) -> float:
    size = partition.size
    for v in (x, y):
        if not 0 <= v < size:
            raise DimensionMismatch(f"pattern id {v} outside 0..{size - 1}")
    gi = partition.group_index
    value = 1.0 / partition.sizes[gi[x]] if gi[x] == gi[y] else 0.0
    return value - (1.0 if x == y else 0.0)


def u_statistic(counts: PatternCounts, partition: Partition) -> float:
    """(1/n^2) times the sum of h over ordered pairs of distinct windows."""
    _check(counts, partition)
    c = counts.counts.astype(float)
    ng = group_totals(c, partition)
    grouped = np.sum((ng * ng - ng) / partition.sizes)
    matched = np.sum(c * (c - 1))
    return float((grouped - matched) / counts.n**2)


def _probability_vector(p, size: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (size,):
        raise NotAProbabilityVector(f"expected {size} probabilities, got shape {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)) or abs(p.sum() - 1.0) > 1e-9:
        raise NotAProbabilityVector("probabilities must be non-negative and sum to 1")
    return p


def symmetrize(p, partition: Partition) -> np.ndarray:
    p = _probability_vector(p, partition.size)
    return (group_totals(p, partition) / partition.sizes)[partition.group_index]


def theta(p, partition: Partition) -> float:
    """Population asymmetry E h(Y1, Y2); zero iff p is constant within groups."""
    p = _probability_vector(p, partition.size)
    g = group_totals(p, partition)
    return float(np.sum(g * g / partition.sizes) - np.sum(p * p))
