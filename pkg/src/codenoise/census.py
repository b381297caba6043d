"""Ordered 4-tuples of equal-weight codewords summing to zero.

For a level set ``A = C cap L_i`` of size ``m``, ``total`` counts ordered
``(u1, u2, u3, u4)`` in ``A^4`` with ``u1 + u2 + u3 + u4 = 0``.  A tuple is
trivial when every vector occurs an even number of times; there are
``3m^2 - 2m`` of those and every other tuple has GF(2) rank 3.

Codewords are handled through their coefficient indices in ``0..2^k - 1``;
the map is linear, so sums and ranks are unchanged.
"""
from __future__ import annotations

import csv
import io
import math
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from . import cube, kernels
from .errors import CapacityError, ContractViolation
from .gf2 import LinearCode, dual_code, gf2_rank, level_positions, sample_random_code, weights
from .krawtchouk import krawtchouk_table
from .psi import binary_entropy, prop18_bound, psi_variational

MAX_PAIR_LEVEL = 1 << 13
MAX_SPECTRAL_DIM = 26
MAX_ORACLE_LEVEL = 1 << 10


@dataclass(frozen=True)
class TupleCensus:
    code_id: str
    n: int
    k: int
    i: int
    m: int
    total: int
    trivial: int

    @property
    def nontrivial(self) -> int:
        return self.total - self.trivial

    def row(self) -> dict:
        return {"code_id": self.code_id, "n": self.n, "k": self.k, "i": self.i, "m": self.m,
                "total": self.total, "trivial": self.trivial, "nontrivial": self.nontrivial}


CENSUS_COLUMNS = ("code_id", "n", "k", "i", "m", "total", "trivial", "nontrivial")
ENSEMBLE_COLUMNS = ("trial", "seed") + CENSUS_COLUMNS


def trivial_count(m: int) -> int:
    """``3m^2 - 2m``: ``m`` constant tuples plus ``3 m (m - 1)`` two-pair patterns."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return 3 * m * m - 2 * m


def trivial_count_brute(m: int) -> int:
    """Pattern enumeration over ``{0..m-1}^4``; for checking :func:`trivial_count`.

    A sorted tuple has every value an even number of times exactly when its
    entries pair up as (first, second) and (third, fourth).
    """
    if m == 0:
        return 0
    grid = np.stack(np.meshgrid(*[np.arange(m)] * 4, indexing="ij"), axis=-1).reshape(-1, 4)
    grid.sort(axis=1)
    return int(np.count_nonzero((grid[:, 0] == grid[:, 1]) & (grid[:, 2] == grid[:, 3])))


def _pairs_total(idx: np.ndarray, k: int) -> int:
    return int(kernels.pair_sum_total(idx, k))


def _fourth_power_sum(g: np.ndarray) -> int:
    sq = g * g
    if len(g) and int(np.abs(g).max()) < 1 << 15:
        return int(np.dot(sq, sq))
    return int(sum(int(v) * int(v) for v in sq))


def _spectral_total(idx: np.ndarray, k: int) -> int:
    """``2^-k sum_x ghat(x)^4`` with ``ghat`` the integer transform of the
    level-set indicator in coefficient space."""
    if k > MAX_SPECTRAL_DIM:
        raise CapacityError(f"spectral census limited to k <= {MAX_SPECTRAL_DIM}")
    g = np.zeros(1 << k, dtype=np.int64)
    g[idx] = 1
    kernels.fwht_int(g)
    s = _fourth_power_sum(g)
    if s % (1 << k):
        raise ContractViolation("spectral fourth moment is not divisible by 2^k")
    return s >> k


def census(code: LinearCode, i: int, method: str = "auto") -> TupleCensus:
    """Census of the weight-``i`` level.

    ``pairs`` accumulates ``P(s) = #{(u1, u2): u1 + u2 = s}`` and returns
    ``sum_s P(s)^2`` (needs ``m <= 2^13``).  ``spectral`` uses the fourth
    moment of the Walsh transform, which handles large ``m``.  ``auto``
    picks ``pairs`` whenever it is in budget.
    """
    idx = level_positions(code, i)
    m = len(idx)
    if method == "auto":
        method = "pairs" if m <= MAX_PAIR_LEVEL else "spectral"
    if m == 0:
        total = 0
    elif method == "pairs":
        if m > MAX_PAIR_LEVEL:
            raise CapacityError(f"level size {m} exceeds pair budget {MAX_PAIR_LEVEL}")
        total = _pairs_total(idx, code.k)
    elif method == "spectral":
        total = _spectral_total(idx, code.k)
    else:
        raise ValueError(f"unknown census method {method!r}")
    return TupleCensus(code.label, code.n, code.k, i, m, total, trivial_count(m))


@dataclass(frozen=True)
class OracleCensus:
    total: int
    trivial: int
    rank3: int
    other: int


def census_oracle(code: LinearCode, i: int) -> OracleCensus:
    """Enumerate ``(u1, u2, u3)`` with ``u4 = u1 + u2 + u3`` forced, classify
    each hit as trivial or by the rank of ``{u1, u2, u3}``."""
    idx = level_positions(code, i)
    if len(idx) > MAX_ORACLE_LEVEL:
        raise CapacityError(f"oracle limited to m <= {MAX_ORACLE_LEVEL}")
    table = np.zeros(1 << code.k, dtype=np.uint8)
    table[idx] = 1
    return OracleCensus(*(int(x) for x in kernels.census_oracle(idx.astype(np.uint64), table)))


def census_ratio_fourier(code: LinearCode, i: int) -> float:
    """``||g||_4^4 / ||g||_2^4`` for ``g`` the unnormalised Walsh transform of
    ``1_{C cap L_i}`` on the full cube; equals ``total / m^2``."""
    f = np.zeros(1 << code.n)
    f[code.codewords()[level_positions(code, i)].astype(np.int64)] = 1.0
    g = cube.fwht(f) * (1 << code.n)
    return float(np.mean(g ** 4) / np.mean(g ** 2) ** 2)


def level_total_exact(n: int, i: int) -> int:
    """Sum-zero ordered 4-tuples in the full level ``L_i``:
    ``2^-n sum_j C(n, j) K_i(j)^4``."""
    K = krawtchouk_table(n, i).values
    s = sum(comb(n, j) * K[j] ** 4 for j in range(n + 1))
    if s % (1 << n):
        raise ContractViolation("Krawtchouk fourth moment is not divisible by 2^n")
    return s >> n


# -- Fourier identity -----------------------------------------------------------

def _weighted_quad_direct(code: LinearCode, rho: float) -> float:
    """``sum over sum-zero 4-tuples in C of rho^(total weight)`` by explicit
    pair sums ``P(s) = sum_{u1 + u2 = s} rho^(|u1| + |u2|)``."""
    words = code.codewords()
    a = np.power(rho, weights(words).astype(np.float64))
    size = len(words)
    P = np.zeros(size)
    idx = np.arange(size, dtype=np.int64)
    chunk = max(1, (1 << 22) // size)
    for start in range(0, size, chunk):
        block = idx[start:start + chunk]
        P += np.bincount((block[:, None] ^ idx[None, :]).ravel(),
                         weights=(a[block, None] * a[None, :]).ravel(), minlength=size)
    return math.fsum((P * P).tolist())


def _weighted_quad_spectral(code: LinearCode, rho: float) -> float:
    words = code.codewords()
    a = np.power(rho, weights(words).astype(np.float64))
    kernels.get_backend().fwht_float(a)
    return math.fsum((a ** 4).tolist()) / len(words)


def quad_norm(code: LinearCode, eps: float) -> float:
    """``||T_eps f||_4^4`` for ``f = |C| 1_{C^perp}``, whose spectrum is ``1_C``."""
    f = cube.scaled_indicator(dual_code(code))
    return 2.0 ** (4 * cube.log2_lq_norm(cube.noise_operator(f, eps), 4))


def fourier_quad_identity(code: LinearCode, eps: float) -> tuple[float, float]:
    """``(||f_eps||_4^4, sum_{x+y+z+w=0 in C} (1-2eps)^(|x|+|y|+|z|+|w|))``.

    The first side is computed on the cube; the second from the code alone
    (explicit pair sums up to ``k = 12``, a transform of size ``2^k`` above).
    ``0^0 = 1`` so only the all-zero tuple survives at ``eps = 1/2``.
    """
    rho = 1.0 - 2.0 * eps
    lhs = quad_norm(code, eps)
    rhs = _weighted_quad_direct(code, rho) if code.k <= 12 else _weighted_quad_spectral(code, rho)
    return lhs, rhs


@dataclass(frozen=True)
class BoundCheck:
    census: TupleCensus
    eps: tuple[float, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    rate_bound: float | None

    @property
    def violations(self) -> int:
        return sum(1 for a, b in zip(self.lhs, self.rhs) if a > b)

    @property
    def slack(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.lhs, self.rhs))


def prop18_bound_check(code: LinearCode, i: int, eps_grid: Sequence[float], R=None) -> BoundCheck:
    """``(1 - 2eps)^(4i) * total <= ||f_eps||_4^4`` at each grid point.

    Exact at every length: the right side is a sum of nonnegative terms over
    all weights and the census keeps only the weight-``i`` ones.  The
    asymptotic rate bound at ``gamma = i/n`` is attached when defined.
    """
    c = census(code, i)
    lhs, rhs = [], []
    for eps in eps_grid:
        lhs.append((1.0 - 2.0 * eps) ** (4 * i) * c.total)
        rhs.append(quad_norm(code, eps))
    R = float(code.rate if R is None else R)
    gamma = i / code.n
    bound = prop18_bound(R, gamma) if 0 < R < 1 and 0 < gamma <= 0.5 else None
    return BoundCheck(c, tuple(float(e) for e in eps_grid), tuple(lhs), tuple(rhs), bound)


# -- ensembles ------------------------------------------------------------------

def trial_seed(seed: int, trial: int) -> int:
    """Seed for one trial, derived from ``(seed, trial)`` only."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint64)[0])


def thread_count() -> int:
    raw = os.environ.get("CODENOISE_THREADS", "").strip()
    if not raw:
        return 1
    value = int(raw)
    if value < 1:
        raise ValueError("CODENOISE_THREADS must be >= 1")
    return value


def ordered_map(fn, items: Sequence, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly on a thread pool; order is kept."""
    threads = thread_count() if threads is None else threads
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def expected_nontrivial(n: int, lam, gamma: float) -> float:
    """``E N_i`` over the kernel ensemble with ``lam n`` checks.

    Every non-trivial tuple has rank 3 and lies in the code with probability
    ``2^(-3 lam n)``; the count of such tuples in ``L_i`` is exact.
    """
    i = _weight_of(n, gamma)
    L = comb(n, i)
    rows = round(float(lam) * n)
    return (level_total_exact(n, i) - trivial_count(L)) / 2.0 ** (3 * rows)


def _weight_of(n: int, gamma: float) -> int:
    i = round(gamma * n)
    if abs(i - gamma * n) > 1e-9:
        raise ValueError(f"gamma * n must be an integer, got {gamma * n}")
    return i


@dataclass(frozen=True)
class EnsembleStats:
    n: int
    lam: float
    gamma: float
    trials: int
    seed: int
    censuses: tuple[TupleCensus, ...]
    seeds: tuple[int, ...]
    log_counts: tuple[float, ...]
    formula: float
    formula_max: float
    exact_log_mean: float

    @property
    def mean(self) -> float:
        return float(np.mean(self.log_counts))

    @property
    def std(self) -> float:
        return float(np.std(self.log_counts, ddof=1)) if self.trials > 1 else 0.0

    def quantiles(self, qs=(0.05, 0.25, 0.5, 0.75, 0.95)) -> dict[float, float]:
        return {q: float(np.quantile(self.log_counts, q)) for q in qs}

    def rows(self) -> list[dict]:
        return [{"trial": t, "seed": s, **c.row()}
                for t, (s, c) in enumerate(zip(self.seeds, self.censuses))]


def ensemble_expectation(n: int, lam, gamma: float, trials: int, seed: int = 0,
                         threads: int | None = None) -> EnsembleStats:
    """Census of ``trials`` kernel-ensemble codes at weight ``gamma n``.

    Per-trial statistic: ``(1/n) log2(nontrivial + 1)`` (the ``+1`` keeps
    empty censuses finite).  ``formula`` is ``psi(4, gamma) + 2h(gamma) - 3 lam``;
    ``formula_max`` also takes the max with ``2h(gamma) - 2 lam``;
    ``exact_log_mean`` is ``(1/n) log2 E N_i`` at this ``n``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    i = _weight_of(n, gamma)
    seeds = [trial_seed(seed, t) for t in range(trials)]

    def one(s: int) -> TupleCensus:
        return census(sample_random_code(n, lam, s), i)

    cens = ordered_map(one, seeds, threads)
    logs = tuple(math.log2(c.nontrivial + 1) / n for c in cens)
    h = binary_entropy(gamma)
    lam_f = float(lam)
    first = psi_variational(4, gamma).value + 2 * h - 3 * lam_f
    expect = expected_nontrivial(n, lam, gamma)
    exact = math.log2(expect) / n if expect > 0 else -math.inf
    return EnsembleStats(n, lam_f, gamma, trials, seed, tuple(cens), tuple(seeds), logs,
                         first, max(first, 2 * h - 2 * lam_f), exact)


@dataclass(frozen=True)
class Containment:
    hits: int
    trials: int
    probability: float

    @property
    def frequency(self) -> float:
        return self.hits / self.trials

    @property
    def sigma(self) -> float:
        p = self.probability
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def z_score(self) -> float:
        return (self.frequency - self.probability) / self.sigma if self.sigma > 0 else 0.0


def fixed_tuple(n: int) -> tuple[int, int, int, int]:
    """``(a+b, b+c, c+d, d+a)`` over four blocks of ``n/4`` coordinates: a
    non-trivial sum-zero tuple of weight ``n/2``, rank 3."""
    if n % 4:
        raise ValueError("n must be divisible by 4")
    q = n // 4
    blk = [((1 << q) - 1) << (q * t) for t in range(4)]
    return (blk[0] | blk[1], blk[1] | blk[2], blk[2] | blk[3], blk[3] | blk[0])


def containment_frequency(words: Sequence[int], n: int, lam, trials: int, seed: int = 0) -> Containment:
    """How often all of ``words`` lie in a kernel-ensemble code, against
    ``2^(-rank * lam n)``."""

    rank = gf2_rank(list(words))
    rows = round(float(lam) * n)
    hits = 0
    for t in range(trials):
        code = sample_random_code(n, lam, trial_seed(seed, t))
        hits += all(code.contains(w) for w in words)
    return Containment(hits, trials, 2.0 ** (-rank * rows))


def census_csv(rows: Sequence[dict], columns: Sequence[str] = CENSUS_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


__all__ = [
    "TupleCensus", "OracleCensus", "trivial_count", "trivial_count_brute", "census", "census_oracle",
    "census_ratio_fourier", "level_total_exact", "fourier_quad_identity", "quad_norm",
    "BoundCheck", "prop18_bound_check", "EnsembleStats", "ensemble_expectation",
    "expected_nontrivial", "Containment", "containment_frequency", "fixed_tuple",
    "trial_seed", "ordered_map", "thread_count", "census_csv", "CENSUS_COLUMNS",
    "ENSEMBLE_COLUMNS",
]
