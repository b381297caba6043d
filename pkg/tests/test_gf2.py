from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codenoise import gf2
from codenoise.errors import CapacityError, InconsistencyError


def _rank_by_restriction(code, T):
    """``2^r(T)`` distinct codeword restrictions to ``T``."""
    mask = sum(1 << j for j in T)
    distinct = {int(w) & mask for w in code.codewords()}
    return len(distinct).bit_length() - 1


def test_rref_is_canonical(rng):
    code = gf2.random_code(12, 6, 3)
    for _ in range(5):
        other = gf2.LinearCode.from_generators(12, gf2.random_basis(code, rng))
        assert other == code
        assert other.generators == code.generators


def test_dependent_rows_rejected():
    with pytest.raises(InconsistencyError):
        gf2.LinearCode.from_generators(4, [0b0011, 0b0101, 0b0110])
    code = gf2.LinearCode.from_generators(4, [0b0011, 0b0101, 0b0110], strict=False)
    assert code.k == 2


def test_from_matrix_bit_order():
    code = gf2.LinearCode.from_matrix([[1, 0, 0, 1], [0, 1, 1, 0]])
    assert set(code.codewords().tolist()) == {0, 0b1001, 0b0110, 0b1111}
    assert np.array_equal(code.generator_matrix(), [[1, 0, 0, 1], [0, 1, 1, 0]])


@pytest.mark.parametrize("seed", range(6))
def test_rank_of_columns_against_restrictions(seed):
    code = gf2.random_code(8, 4, seed)
    for t in range(9):
        for T in combinations(range(8), t):
            assert gf2.rank_of_columns(code, T) == _rank_by_restriction(code, T)


def test_rank_is_monotone_and_submodular():
    code = gf2.random_code(7, 4, 9)
    r = {m: gf2.rank_of_columns(code, [j for j in range(7) if m >> j & 1]) for m in range(1 << 7)}
    for a in range(1 << 7):
        for b in range(1 << 7):
            assert r[a | b] + r[a & b] <= r[a] + r[b]
            if a & b == a:
                assert r[a] <= r[b]


def test_rank_of_columns_range():
    with pytest.raises(ValueError):
        gf2.rank_of_columns(gf2.full_space(4), [4])


@pytest.mark.parametrize("seed", range(5))
def test_dual_involution_and_rank_identity(seed):
    code = gf2.random_code(10, 4 + seed % 3, seed)
    dual = gf2.dual_code(code)
    assert dual.k == code.n - code.k
    assert gf2.dual_code(dual) == code
    for w in dual.codewords():
        assert all(bin(int(w) & g).count("1") % 2 == 0 for g in code.generators)
    for S in range(1 << code.n):
        s = [j for j in range(code.n) if S >> j & 1]
        comp = [j for j in range(code.n) if not S >> j & 1]
        assert gf2.rank_of_columns(dual, s) == len(s) + gf2.rank_of_columns(code, comp) - code.k


@pytest.mark.parametrize("seed", range(5))
def test_macwilliams(seed):
    code = gf2.random_code(12, 3 + seed, seed)
    W = gf2.weight_distribution(code)
    assert gf2.macwilliams_transform(W) == gf2.weight_distribution(gf2.dual_code(code))


def test_macwilliams_rejects_bad_input():
    with pytest.raises(InconsistencyError):
        gf2.macwilliams_transform(gf2.WeightDistribution(3, (1, 3, 0, 0)))
    with pytest.raises(InconsistencyError):
        gf2.macwilliams_transform(gf2.WeightDistribution(3, (1, 0, 0, 2)))


def test_macwilliams_of_zero_code():
    W = gf2.weight_distribution(gf2.zero_code(6))
    assert gf2.macwilliams_transform(W) == gf2.binomial_distribution(6)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 7])
def test_first_order_reed_muller(m):
    code = gf2.reed_muller(1, m)
    n = 1 << m
    assert (code.n, code.k) == (n, m + 1)
    counts = [0] * (n + 1)
    counts[0] = counts[n] = 1
    counts[n // 2] = n * 2 - 2
    assert gf2.weight_distribution(code).counts == tuple(counts)


def test_reed_muller_dimensions_and_duality():
    from math import comb
    for m in range(1, 6):
        for r in range(m + 1):
            assert gf2.reed_muller(r, m).k == sum(comb(m, j) for j in range(r + 1))
    assert gf2.dual_code(gf2.reed_muller(1, 4)) == gf2.reed_muller(2, 4)


def test_repetition_pair_self_dual():
    code = gf2.repetition_pair(10)
    assert code.rate == Fraction(1, 2)
    assert gf2.dual_code(code) == code
    with pytest.raises(ValueError):
        gf2.repetition_pair(7)


def test_codeword_budget():
    with pytest.raises(CapacityError):
        gf2.full_space(28).codewords()
    with pytest.raises(CapacityError):
        gf2.reed_muller(1, 7).codewords()


def test_random_ensembles_are_seeded():
    a = gf2.sample_random_code(16, Fraction(1, 4), 5)
    b = gf2.sample_random_code(16, 0.25, 5)
    assert a == b
    assert a.k >= 12
    assert gf2.random_code(14, 7, 2) == gf2.random_code(14, 7, 2)
    with pytest.raises(ValueError):
        gf2.sample_random_code(10, 0.33, 0)


def test_level_sets():
    code = gf2.reed_muller(1, 3)
    assert len(gf2.level_set(code, 4)) == 14
    words = code.codewords()
    assert np.array_equal(words[gf2.level_positions(code, 4)], gf2.level_set(code, 4))


def test_matrix_format_round_trip(tmp_path):
    code = gf2.random_code(11, 5, 1)
    path = tmp_path / "c.txt"
    gf2.write_matrix(code, path)
    assert gf2.read_matrix(path) == code
    assert gf2.parse_matrix("# comment\n3 1\n101\n") == gf2.LinearCode(3, (0b101,))


@pytest.mark.parametrize("text", ["", "3\n101", "3 2\n101", "3 1\n10", "3 1\n1a1", "3 2\n101\n101"])
def test_matrix_format_errors(text):
    with pytest.raises(ValueError):
        gf2.parse_matrix(text)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, (1 << 10) - 1), max_size=12))
def test_rank_matches_rref(rows):
    reduced, pivots = gf2.rref(rows)
    assert gf2.gf2_rank(rows) == len(reduced)
    assert pivots == sorted(set(pivots))
    for r, p in zip(reduced, pivots):
        assert all(not (o >> p & 1) for o in reduced if o != r)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, (1 << 9) - 1), max_size=6))
def test_kernel_is_orthogonal_complement(rows):
    ker = gf2.kernel(rows, 9)
    assert len(ker) == 9 - gf2.gf2_rank(rows)
    assert gf2.gf2_rank(ker) == len(ker)
    for v in ker:
        assert all(bin(v & r).count("1") % 2 == 0 for r in rows)
