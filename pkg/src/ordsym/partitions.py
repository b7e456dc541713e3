"""Partitions of the pattern set encoding the symmetry hypothesis.

Groups are stored in canonical order: members ascending by pattern id, groups
ordered by their smallest member.  The eigenvector layout of the spectral
model and every report depend on this order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Iterable, Sequence

import numpy as np

from . import patterns as pt
from .errors import BadPatternLiteral, DuplicatePattern, NotAPartition


@dataclass(frozen=True)
class Partition:
    d: int
    groups: tuple[tuple[int, ...], ...]
    name: str = "custom"
    _group_index: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        size = factorial(self.d)
        index = np.full(size, -1, dtype=np.int64)
        for g, members in enumerate(self.groups):
            if not members:
                raise NotAPartition(f"group {g} is empty")
            for pid in members:
                if not 0 <= pid < size:
                    raise NotAPartition(f"pattern id {pid} outside 0..{size - 1}")
                if index[pid] >= 0:
                    raise DuplicatePattern(
                        f"pattern {pt.format_pattern(pt.decode(pid, self.d))} appears in more than one group"
                    )
                index[pid] = g
        if np.any(index < 0):
            missing = [pt.format_pattern(pt.decode(int(i), self.d)) for i in np.flatnonzero(index < 0)]
            raise NotAPartition(f"patterns not covered: {' '.join(missing)}")
        index.setflags(write=False)
        object.__setattr__(self, "_group_index", index)

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def size(self) -> int:
        return factorial(self.d)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(g) for g in self.groups], dtype=np.int64)

    @property
    def group_index(self) -> np.ndarray:
        """Array mapping each pattern id to its group number."""
        return self._group_index

    def as_patterns(self) -> list[list[pt.OrdinalPattern]]:
        return [[pt.decode(pid, self.d) for pid in g] for g in self.groups]

    def to_text(self) -> str:
        """Render in the partition file format (one group per line)."""
        return "\n".join(" ".join(pt.format_pattern(p) for p in g) for g in self.as_patterns()) + "\n"

    def describe(self) -> list[list[str]]:
        return [[pt.format_pattern(p) for p in g] for g in self.as_patterns()]


def _canonical(d: int, groups: Iterable[Iterable[int]], name: str) -> Partition:
    ordered = sorted((tuple(sorted(set(g))) for g in groups), key=lambda g: g[0] if g else -1)
    return Partition(d, tuple(ordered), name)


def orbit_partition(d: int, maps: Sequence[Callable[[pt.OrdinalPattern], pt.OrdinalPattern]], name: str) -> Partition:
    """Orbits of the pattern set under the group generated by ``maps``."""
    pats = pt.all_patterns(d)
    seen: set[int] = set()
    groups = []
    for start in range(len(pats)):
        if start in seen:
            continue
        orbit = {start}
        frontier = [pats[start]]
        while frontier:
            p = frontier.pop()
            for f in maps:
                q = f(p)
                qid = pt.encode(q)
                if qid not in orbit:
                    orbit.add(qid)
                    frontier.append(q)
        seen |= orbit
        groups.append(orbit)
    return _canonical(d, groups, name)


def reversal_partition(d: int) -> Partition:
    return orbit_partition(d, [pt.reverse], "reversal")


def reflection_partition(d: int) -> Partition:
    return orbit_partition(d, [pt.reflect], "reflection")


def gaussian_partition(d: int) -> Partition:
    """Orbits under both reversal and reflection (symmetries of Gaussian processes)."""
    return orbit_partition(d, [pt.reverse, pt.reflect], "gaussian")


def singleton_partition(d: int) -> Partition:
    pt.check_order(d)
    return Partition(d, tuple((i,) for i in range(factorial(d))), "singleton")


def from_patterns(d: int, groups: Iterable[Iterable[Sequence[int]]], name: str = "custom") -> Partition:
    """Build a partition from groups written as pattern tuples."""
    pt.check_order(d)
    out = []
    seen: set[int] = set()
    for g in groups:
        ids = []
        for p in g:
            p = pt.validate(p)
            if len(p) != d:
                raise BadPatternLiteral(f"pattern {pt.format_pattern(p)} has length {len(p)}, expected {d}")
            pid = pt.encode(p)
            if pid in seen:
                raise DuplicatePattern(f"pattern {pt.format_pattern(p)} listed more than once")
            seen.add(pid)
            ids.append(pid)
        out.append(ids)
    return _canonical(d, out, name)


_TUPLE = re.compile(r"\([^()]*\)")


def parse_partition_text(text: str) -> list[list[pt.OrdinalPattern]]:
    """Parse the group-per-line text format; ``#`` starts a comment."""
    groups = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        literals = _TUPLE.findall(line)
        leftover = _TUPLE.sub("", line)
        if not literals or leftover.strip(" \t,{}[];"):
            raise BadPatternLiteral(f"line {lineno}: cannot parse {raw.strip()!r}")
        groups.append([pt.parse_pattern(lit) for lit in literals])
    return groups


def custom_partition(d: int, spec: str, complete_with_singletons: bool = False, name: str = "custom") -> Partition:
    """Partition from its textual description.

    Patterns missing from ``spec`` raise :class:`NotAPartition` unless
    ``complete_with_singletons`` is set, in which case each becomes its own group.
    """
    groups = parse_partition_text(spec)
    if complete_with_singletons:
        listed = {pt.validate(p) for g in groups for p in g}
        groups += [[p] for p in pt.all_patterns(d) if p not in listed]
    return from_patterns(d, groups, name)


BUILDERS = {
    "reversal": reversal_partition,
    "reflection": reflection_partition,
    "gaussian": gaussian_partition,
    "singleton": singleton_partition,
}
