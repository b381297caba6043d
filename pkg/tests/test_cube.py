import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codenoise import cube, gf2
from codenoise.errors import CapacityError


def _random_f(rng, n):
    return rng.exponential(size=1 << n) ** rng.uniform(0.5, 3)


def test_constant_has_single_coefficient():
    c = cube.fwht(np.ones(1 << 5))
    assert c[0] == 1 and not np.any(c[1:])


@pytest.mark.parametrize("seed", range(4))
def test_dual_density_spectrum_is_code_indicator(seed):
    code = gf2.random_code(9, 4, seed)
    f = cube.scaled_indicator(gf2.dual_code(code))
    np.testing.assert_allclose(cube.fwht(f), cube.indicator(code), atol=1e-12)


def test_inverse_and_parseval(rng):
    for n in (1, 8, 12):
        f = rng.normal(size=1 << n)
        c = cube.fwht(f)
        np.testing.assert_allclose(cube.ifwht(c), f, atol=1e-12)
        assert math.isclose(np.sum(c * c), np.mean(f * f), rel_tol=1e-12)


def test_noise_endpoints(rng):
    f = _random_f(rng, 7)
    np.testing.assert_array_equal(cube.noise_operator(f, 0.0), f)
    np.testing.assert_allclose(cube.noise_operator(f, 0.5), np.full_like(f, f.mean()), rtol=1e-12)
    with pytest.raises(ValueError):
        cube.noise_operator(f, 0.6)
    with pytest.raises(ValueError):
        cube.noise_operator(f, -0.1)


def test_noisy_point_mass():
    n, eps = 6, 0.3
    g = cube.noise_operator(cube.point_mass(n) * 2 ** n, eps)
    w = cube.frequency_weights(n)
    np.testing.assert_allclose(g / 2 ** n, eps ** w * (1 - eps) ** (n - w), atol=1e-15)


def test_fast_and_direct_noise_agree(rng):
    for _ in range(50):
        f = _random_f(rng, 8)
        for eps in (0.0, 0.05, 0.2, 0.45):
            diff = np.abs(cube.noise_operator(f, eps) - cube.noise_operator_direct(f, eps)).max()
            assert diff <= 1e-10 * max(1.0, f.max())
    with pytest.raises(CapacityError):
        cube.noise_operator_direct(np.ones(1 << 11), 0.1)


def test_semigroup(rng):
    f = _random_f(rng, 8)
    e1, e2 = 0.1, 0.23
    e3 = (1 - (1 - 2 * e1) * (1 - 2 * e2)) / 2
    np.testing.assert_allclose(cube.noise_operator(cube.noise_operator(f, e1), e2),
                               cube.noise_operator(f, e3), rtol=1e-12)


def test_norm_of_constant():
    for q in (1, 2, 3.5, 8, 20, math.inf):
        assert math.isclose(cube.lq_norm(np.full(32, 2.5), q), 2.5, rel_tol=1e-12)


@pytest.mark.parametrize("q", [2, 3, 4, 9, math.inf])
def test_code_density_norm(q):
    code = gf2.random_code(10, 4, 1)
    value = cube.log2_lq_norm(cube.scaled_indicator(code), q) / code.n
    factor = 1.0 if q == math.inf else (q - 1) / q
    assert math.isclose(value, factor * (1 - 4 / 10), rel_tol=1e-12)


def test_norms_nondecreasing_in_q(rng):
    f = _random_f(rng, 8)
    vals = [cube.log2_lq_norm(f, q) for q in (1, 1.5, 2, 3, 4, 7.9, 8, 12, 30, math.inf)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_log_domain_switch_is_continuous(rng):
    f = _random_f(rng, 9)
    direct = math.log2(np.mean(f ** 8)) / 8
    assert math.isclose(cube.log2_lq_norm(f, 8), direct, rel_tol=1e-12)
    huge = np.full(16, 1e200)
    assert math.isclose(cube.log2_lq_norm(huge, 40), math.log2(1e200), rel_tol=1e-12)


def test_batch_norms_match(rng):
    fs = np.stack([_random_f(rng, 6) for _ in range(5)])
    for q in (2, 3, 10, math.inf):
        np.testing.assert_allclose(cube.batch_log2_norms(fs, q), [cube.log2_lq_norm(f, q) for f in fs],
                                   rtol=1e-12)


def test_norm_decreases_with_noise(rng):
    f = _random_f(rng, 8)
    grid = np.linspace(0, 0.5, 11)
    for q in (2, 4, math.inf):
        vals = [cube.log2_lq_norm(cube.noise_operator(f, e), q) for e in grid]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def _conditional_brute(f, T, n):
    mask = sum(1 << j for j in T)
    out = np.empty_like(f)
    for x in range(1 << n):
        out[x] = np.mean([f[y] for y in range(1 << n) if (x ^ y) & mask == 0])
    return out


def test_conditional_expectation(rng):
    n = 5
    f = _random_f(rng, n)
    np.testing.assert_allclose(cube.conditional_expectation(f, []), np.full_like(f, f.mean()))
    np.testing.assert_allclose(cube.conditional_expectation(f, range(n)), f)
    for T in ([0], [1, 3], [0, 2, 4], [4]):
        np.testing.assert_allclose(cube.conditional_expectation(f, T), _conditional_brute(f, T, n), rtol=1e-12)
    with pytest.raises(ValueError):
        cube.conditional_expectation(f, [5])


def test_tower_property(rng):
    n = 6
    f = _random_f(rng, n)
    for t in range(n + 1):
        for T in combinations(range(n), t):
            fT = cube.conditional_expectation(f, T)
            for s in range(t + 1):
                for S in combinations(T, s):
                    np.testing.assert_allclose(cube.conditional_expectation(fT, S),
                                               cube.conditional_expectation(f, S), rtol=1e-12)


def test_all_conditional_norms_match_direct(rng):
    n = 6
    fs = np.stack([_random_f(rng, n) for _ in range(3)])
    qs = [2, 3, math.inf]
    out = cube.all_conditional_log2_norms(fs, qs)
    for mask in range(1 << n):
        T = [j for j in range(n) if mask >> j & 1]
        for b, f in enumerate(fs):
            g = cube.conditional_expectation(f, T)
            for q in qs:
                assert math.isclose(out[q][b, mask], cube.log2_lq_norm(g, q), rel_tol=1e-10, abs_tol=1e-12)


def test_dimension_checks():
    with pytest.raises(ValueError):
        cube.fwht(np.ones(12))
    with pytest.raises(CapacityError):
        cube.all_conditional_log2_norms(np.ones((1, 1 << 13)), [2])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.floats(0, 0.5), st.integers(0, 2**32 - 1))
def test_noise_preserves_mean_and_positivity(n, eps, seed):
    f = np.random.default_rng(seed).exponential(size=1 << n)
    g = cube.noise_operator(f, eps)
    assert math.isclose(g.mean(), f.mean(), rel_tol=1e-12)
    assert g.min() >= -1e-12
    assert cube.log2_lq_norm(np.maximum(g, 0), 3) <= cube.log2_lq_norm(f, 3) + 1e-12
