"""Ordinal patterns: window-to-permutation map, symmetry operations, dense ids.

A pattern of order ``d`` is a tuple ``(p1, ..., pd)`` holding a permutation of
``1..d`` such that ``w[p1-1] <= w[p2-1] <= ... <= w[pd-1]`` for the window
``w``.  Equal values are ordered so that the larger original index comes
first, e.g. ``(1, 2, 2) -> (1, 3, 2)``.

Patterns are identified by their Lehmer code, an integer in ``0..d!-1``; the
identity permutation has id 0.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadPatternLiteral,
    IdOutOfRange,
    InvalidPattern,
    NonFiniteValue,
    SeriesTooShort,
    WindowTooShort,
)

OrdinalPattern = tuple[int, ...]

MAX_ORDER = 8


def set_max_order(d_max: int) -> None:
    """Raise or lower the hard cap on the pattern order (default 8)."""
    global MAX_ORDER
    if d_max < 2:
        raise ValueError("max order must be >= 2")
    MAX_ORDER = int(d_max)
    _all_patterns.cache_clear()


def check_order(d: int) -> int:
    d = int(d)
    if d < 2:
        raise WindowTooShort(f"pattern order must be >= 2, got {d}")
    if d > MAX_ORDER:
        raise WindowTooShort(f"pattern order {d} exceeds the configured cap {MAX_ORDER}")
    return d


def validate(pi: Sequence[int]) -> OrdinalPattern:
    """Return ``pi`` as a tuple after checking it is a permutation of 1..d."""
    pi = tuple(int(v) for v in pi)
    d = len(pi)
    if d < 2:
        raise InvalidPattern(f"pattern {pi} has fewer than 2 entries")
    if sorted(pi) != list(range(1, d + 1)):
        raise InvalidPattern(f"{pi} is not a permutation of 1..{d}")
    return pi


def _orders(windows: np.ndarray) -> np.ndarray:
    """0-based argsort of each row with ties broken by larger index first."""
    d = windows.shape[-1]
    # stable sort on the reversed row puts later indices first among equals
    return (d - 1) - np.argsort(windows[..., ::-1], axis=-1, kind="stable")


def extract_pattern(window: Sequence[float]) -> OrdinalPattern:
    """Ordinal pattern of a single window.

    >>> extract_pattern((4.2, 3.1, 5.0))
    (2, 1, 3)
    >>> extract_pattern((1, 2, 2))
    (1, 3, 2)
    """
    w = np.asarray(window, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise WindowTooShort(f"window must have length >= 2, got {w.size}")
    if not np.all(np.isfinite(w)):
        raise NonFiniteValue("window contains NaN or infinite values")
    return tuple(int(v) + 1 for v in _orders(w))


def lehmer_codes(orders: np.ndarray) -> np.ndarray:
    """Lehmer codes of 0-based permutations stored row-wise in ``orders``."""
    orders = np.asarray(orders)
    d = orders.shape[-1]
    codes = np.zeros(orders.shape[:-1], dtype=np.int64)
    for j in range(d - 1):
        smaller = (orders[..., j + 1:] < orders[..., j : j + 1]).sum(axis=-1)
        codes += smaller * factorial(d - 1 - j)
    return codes


def pattern_sequence(series: Sequence[float], d: int) -> np.ndarray:
    """Pattern ids of all ``len(series) - d + 1`` overlapping windows."""
    d = check_order(d)
    x = np.asarray(series, dtype=float).ravel()
    if x.size < d:
        raise SeriesTooShort(f"series of length {x.size} is shorter than d={d}")
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise NonFiniteValue(f"series contains a non-finite value at index {bad}")
    windows = np.lib.stride_tricks.sliding_window_view(x, d)
    return lehmer_codes(_orders(windows))


def reverse(pi: Sequence[int]) -> OrdinalPattern:
    """Pattern of the time-reversed window."""
    return validate(pi)[::-1]


def reflect(pi: Sequence[int]) -> OrdinalPattern:
    """Pattern of the sign-flipped window, ``d + 1 - p_i`` entrywise."""
    pi = validate(pi)
    d = len(pi)
    return tuple(d + 1 - v for v in pi)


def encode(pi: Sequence[int]) -> int:
    pi = validate(pi)
    return int(lehmer_codes(np.asarray(pi)))


def decode(pid: int, d: int) -> OrdinalPattern:
    d = int(d)
    if d < 2:
        raise WindowTooShort(f"pattern order must be >= 2, got {d}")
    if not 0 <= pid < factorial(d):
        raise IdOutOfRange(f"id {pid} outside 0..{factorial(d) - 1} for d={d}")
    pool = list(range(1, d + 1))
    out = []
    rem = int(pid)
    for j in range(d - 1, -1, -1):
        q, rem = divmod(rem, factorial(j))
        out.append(pool.pop(q))
    return tuple(out)


@lru_cache(maxsize=None)
def _all_patterns(d: int) -> tuple[OrdinalPattern, ...]:
    return tuple(decode(i, d) for i in range(factorial(d)))


def all_patterns(d: int) -> tuple[OrdinalPattern, ...]:
    """Every pattern of order ``d``, indexed by id."""
    return _all_patterns(check_order(d))


def format_pattern(pi: Iterable[int]) -> str:
    return "(" + ",".join(str(v) for v in pi) + ")"


_LITERAL = re.compile(r"^\(\s*\d+(\s*,\s*\d+)*\s*\)$")


def parse_pattern(text: str) -> OrdinalPattern:
    """Parse ``"(2,1,3)"`` into a validated pattern."""
    text = text.strip()
    if not _LITERAL.match(text):
        raise BadPatternLiteral(f"cannot parse pattern literal {text!r}")
    try:
        return validate(int(v) for v in text[1:-1].split(","))
    except InvalidPattern as exc:
        raise BadPatternLiteral(str(exc)) from None
