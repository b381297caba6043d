"""Exact Krawtchouk values with Python integers."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class KrawtchoukTable:
    """Exact values ``K_i(j)`` for ``j = 0..n``."""

    n: int
    i: int
    values: tuple[int, ...]

    def __getitem__(self, j: int) -> int:
        return self.values[j]


def krawtchouk_rows(n: int, degree: int) -> list[tuple[int, ...]]:
    """All tables ``K_0, ..., K_degree`` on ``j = 0..n``.

    Uses the recurrence in the degree
    ``(d+1) K_{d+1}(j) = (n - 2j) K_d(j) - (n - d + 1) K_{d-1}(j)``,
    whose division is exact.
    """
    if n < 0 or degree < 0:
        raise ValueError("n and degree must be nonnegative")
    if degree > n:
        raise ValueError(f"degree {degree} exceeds n={n}")
    j = np.arange(n + 1, dtype=object)
    lin = n - 2 * j
    prev = np.ones(n + 1, dtype=object)
    rows = [tuple(int(v) for v in prev)]
    if degree == 0:
        return rows
    cur = lin.copy()
    rows.append(tuple(int(v) for v in cur))
    for d in range(1, degree):
        nxt = (lin * cur - (n - d + 1) * prev) // (d + 1)
        prev, cur = cur, nxt
        rows.append(tuple(int(v) for v in cur))
    return rows


@lru_cache(maxsize=256)
def krawtchouk_table(n: int, i: int) -> KrawtchoukTable:
    """Exact ``K_i(j) = sum over |x| = i of (-1)^<x, y>`` for any ``|y| = j``."""
    return KrawtchoukTable(n, i, krawtchouk_rows(n, i)[-1])


@lru_cache(maxsize=64)
def krawtchouk_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    """``K[d][j]`` for all degrees ``d`` and points ``j``."""
    return tuple(krawtchouk_rows(n, n))
