import math
from fractions import Fraction

import numpy as np
import pytest

from codenoise import census as cs, gf2
from codenoise.errors import CapacityError
from codenoise.krawtchouk import krawtchouk_table


def test_trivial_count():
    assert [cs.trivial_count(m) for m in (0, 1, 2, 5)] == [0, 1, 8, 65]
    for m in range(0, 41, 3):
        assert cs.trivial_count_brute(m) == cs.trivial_count(m)
    with pytest.raises(ValueError):
        cs.trivial_count(-1)


def test_empty_and_singleton_levels():
    code = gf2.reed_muller(1, 3)
    c = cs.census(code, 3)
    assert (c.m, c.total, c.trivial, c.nontrivial) == (0, 0, 0, 0)
    c = cs.census(code, 8)
    assert (c.m, c.total, c.trivial, c.nontrivial) == (1, 1, 1, 0)


@pytest.mark.parametrize("seed", range(5))
def test_routes_agree_with_oracle(seed):
    code = gf2.random_code(12 + seed % 3, 6 + seed % 4, seed)
    for i in range(code.n + 1):
        fast = cs.census(code, i, "pairs")
        spec = cs.census(code, i, "spectral")
        o = cs.census_oracle(code, i)
        assert fast == spec
        assert (o.total, o.trivial, o.rank3, o.other) == (fast.total, fast.trivial, fast.nontrivial, 0)


def test_full_level_matches_krawtchouk_moment():
    for n in (6, 9, 10):
        code = gf2.full_space(n)
        for i in range(n + 1):
            assert cs.census(code, i).total == cs.level_total_exact(n, i)


def test_ratio_interpretation():
    code = gf2.random_code(13, 7, 2)
    for i in range(1, 14):
        c = cs.census(code, i)
        if c.m:
            assert math.isclose(cs.census_ratio_fourier(code, i), c.total / c.m ** 2, rel_tol=1e-9)


def test_pair_budget():
    code = gf2.full_space(16)
    assert cs.census(code, 8).m == 12870
    with pytest.raises(CapacityError):
        cs.census(code, 8, "pairs")
    with pytest.raises(ValueError):
        cs.census(code, 2, "bogus")


def test_quad_identity_examples():
    assert cs.fourier_quad_identity(gf2.zero_code(6), 0.3) == (pytest.approx(1.0), pytest.approx(1.0))
    for code in (gf2.full_space(5), gf2.reed_muller(1, 3)):
        lhs, rhs = cs.fourier_quad_identity(code, 0.5)
        assert math.isclose(lhs, 1, rel_tol=1e-9) and rhs == 1
    lhs, rhs = cs.fourier_quad_identity(gf2.repetition_pair(8), 0.2)
    assert math.isclose(lhs, rhs, rel_tol=1e-9)
    # full space: f = 2^n delta_0 and the sum factorises per coordinate
    n, eps = 6, 0.2
    rho = 1 - 2 * eps
    lhs, rhs = cs.fourier_quad_identity(gf2.full_space(n), eps)
    per_coord = 1 + 6 * rho ** 2 + rho ** 4
    assert math.isclose(rhs, per_coord ** n, rel_tol=1e-12)
    assert math.isclose(lhs, per_coord ** n, rel_tol=1e-9)


def test_quad_identity_spectral_branch():
    code = gf2.random_code(15, 13, 0)
    rho = 0.7
    assert math.isclose(cs._weighted_quad_spectral(code, rho), cs._weighted_quad_direct(code, rho), rel_tol=1e-10)


def test_bound_check():
    rep = cs.prop18_bound_check(gf2.repetition_pair(8), 4, np.linspace(0, 0.5, 11))
    assert rep.violations == 0
    assert rep.lhs[0] == rep.census.total <= rep.rhs[0]
    rm = cs.prop18_bound_check(gf2.reed_muller(1, 4), 8, np.linspace(0, 0.5, 11))
    assert rm.violations == 0 and min(rm.slack) >= 0
    assert rm.rate_bound is not None


def test_expected_nontrivial_small_ensemble():
    n, lam, gamma = 8, Fraction(1, 8), 0.5
    expect = cs.expected_nontrivial(n, lam, gamma)
    L = 70
    K = krawtchouk_table(n, 4).values
    total = sum(math.comb(n, j) * K[j] ** 4 for j in range(n + 1)) // 2 ** n
    assert math.isclose(expect, (total - 3 * L * L + 2 * L) / 2 ** 3)
    counts = [cs.census(gf2.sample_random_code(n, lam, cs.trial_seed(4, t)), 4).nontrivial for t in range(3000)]
    se = np.std(counts) / math.sqrt(len(counts))
    assert abs(np.mean(counts) - expect) <= 4 * se


def test_zero_rate_ensemble_is_full_level():
    st = cs.ensemble_expectation(12, 0, 0.5, 3, seed=1)
    full = cs.census(gf2.full_space(12), 6)
    assert all(c.total == full.total for c in st.censuses)
    assert math.isclose(st.exact_log_mean, math.log2(full.nontrivial) / 12)


def test_ensemble_is_reproducible_under_threads(monkeypatch):
    a = cs.ensemble_expectation(16, 0.25, 0.5, 6, seed=9, threads=1)
    b = cs.ensemble_expectation(16, 0.25, 0.5, 6, seed=9, threads=4)
    assert a == b
    monkeypatch.setenv("CODENOISE_THREADS", "3")
    assert cs.thread_count() == 3
    assert cs.ensemble_expectation(16, 0.25, 0.5, 6, seed=9) == a
    monkeypatch.setenv("CODENOISE_THREADS", "0")
    with pytest.raises(ValueError):
        cs.thread_count()
    with pytest.raises(ValueError):
        cs.ensemble_expectation(10, 0.2, 0.25, 1)


def test_containment_rate():
    words = cs.fixed_tuple(16)
    assert gf2.gf2_rank(list(words)) == 3
    assert words[0] ^ words[1] ^ words[2] ^ words[3] == 0
    assert all(bin(w).count("1") == 8 for w in words)
    res = cs.containment_frequency(words, 16, Fraction(1, 16), 1500, seed=2)
    assert res.probability == 1 / 8
    assert abs(res.z_score) <= 4


def test_csv_export():
    st = cs.ensemble_expectation(12, 0.25, 0.5, 2, seed=0)
    text = cs.census_csv(st.rows(), cs.ENSEMBLE_COLUMNS)
    lines = text.splitlines()
    assert lines[0] == "trial,seed,code_id,n,k,i,m,total,trivial,nontrivial"
    assert len(lines) == 3
    row = cs.census_csv([cs.census(gf2.full_space(4), 2).row()]).splitlines()[1]
    assert row == f"full(4),4,4,2,6,{cs.level_total_exact(4, 2)},96,{cs.level_total_exact(4, 2) - 96}"
