from itertools import combinations
from math import comb

import pytest

from codenoise.krawtchouk import krawtchouk_matrix, krawtchouk_table


def _character_sum(n, i, j):
    y = (1 << j) - 1
    return sum((-1) ** bin(sum(1 << t for t in xs) & y).count("1") for xs in combinations(range(n), i))


@pytest.mark.parametrize("n", [1, 4, 7, 10])
def test_values_are_character_sums(n):
    for i in range(n + 1):
        table = krawtchouk_table(n, i)
        assert table.values == tuple(_character_sum(n, i, j) for j in range(n + 1))


def test_orthogonality():
    n = 13
    K = krawtchouk_matrix(n)
    for a in range(n + 1):
        for b in range(n + 1):
            s = sum(comb(n, j) * K[a][j] * K[b][j] for j in range(n + 1))
            assert s == (2 ** n * comb(n, a) if a == b else 0)


def test_large_n_is_exact():
    t = krawtchouk_table(1024, 512)
    assert t[0] == comb(1024, 512)
    assert t[1024] == comb(1024, 512)
    assert t[1] == 0  # odd j at the middle degree
    assert sum(comb(1024, j) * t[j] for j in range(1025)) == 0


def test_bad_degree():
    with pytest.raises(ValueError):
        krawtchouk_table(3, 4)
