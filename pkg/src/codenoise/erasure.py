"""Expected rank deficiency of random column subsets.

For a code ``C`` and ``T ~ lam`` (each coordinate kept independently with
probability ``lam``), ``m(lam) = E(|T| - r_C(T))``.  A family is
pseudorandom when ``m(R) = o(n)`` at its rate ``R``; at finite ``n`` the
library only reports ``m(R)/n`` as a score.
"""
from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import CapacityError, ContractViolation
from .gf2 import LinearCode, gf2_rank

MAX_EXACT_LENGTH = 22
DEFAULT_MC_SAMPLES = 200_000


def _check_lam(lam) -> None:
    if not 0 <= lam <= 1:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")


@lru_cache(maxsize=64)
def rank_profile(code: LinearCode) -> np.ndarray:
    """``r_C(T)`` for every mask ``T`` in ``0..2^n - 1``."""
    if code.n > MAX_EXACT_LENGTH:
        raise CapacityError(f"subset enumeration limited to n <= {MAX_EXACT_LENGTH}")
    ranks = kernels.subset_ranks(np.array(code.columns(), dtype=np.uint64), code.n, code.k)
    ranks.flags.writeable = False
    return ranks


@lru_cache(maxsize=64)
def deficiency_by_size(code: LinearCode) -> tuple[int, ...]:
    """``D[t] = sum over |T| = t of (t - r_C(T))``, exact integers."""
    n = code.n
    ranks = rank_profile(code).astype(np.int64)
    sizes = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    sums = np.bincount(sizes, weights=sizes - ranks, minlength=n + 1)
    return tuple(int(round(s)) for s in sums)


# -- first-order Reed-Muller geometry ---------------------------------------

def affine_geometry_order(code: LinearCode) -> int | None:
    """``m`` if the columns are exactly the points of an affine hyperplane of
    ``F_2^k`` avoiding 0 (the column set of RM(1, m) up to basis), else None.
    """
    k = code.k
    if k < 1 or code.n != 1 << (k - 1):
        return None
    cols = code.columns()
    if len(set(cols)) != code.n or 0 in cols:
        return None
    base = cols[0]
    diffs = [c ^ base for c in cols[1:]]
    if gf2_rank(diffs) != k - 1 or gf2_rank(diffs + [base]) != k:
        return None
    return k - 1


def _gauss_binom(d: int, e: int) -> int:
    num = den = 1
    for t in range(e):
        num *= (1 << (d - t)) - 1
        den *= (1 << (t + 1)) - 1
    return num // den


def _flat_count(d: int, e: int) -> int:
    """Number of ``e``-dimensional affine flats inside a ``d``-dimensional one."""
    return (1 << (d - e)) * _gauss_binom(d, e)


def m_lambda_affine(m: int, lam) -> Fraction:
    """Exact ``m(lam)`` for RM(1, m), in rationals.

    With columns ``(1, x)``, ``r(T) = dim aff(T) + 1`` (0 for empty ``T``).
    ``P(T inside a given d-flat) = (1-lam)^(2^m - 2^d)`` and Moebius inversion
    over the flats contained in a flat gives ``P(aff(T) = F)`` per dimension.
    """
    lam = Fraction(lam)
    n = 1 << m
    p_empty = (1 - lam) ** n
    exact: list[Fraction] = []
    for d in range(m + 1):
        inside = (1 - lam) ** (n - (1 << d))
        exact.append(inside - p_empty - sum(_flat_count(d, e) * exact[e] for e in range(d)))
    mean_rank = sum((e + 1) * _flat_count(m, e) * exact[e] for e in range(m + 1))
    return lam * n - mean_rank


# -- m(lambda) ----------------------------------------------------------------

def m_lambda_exact(code: LinearCode, lam) -> float:
    """``E_{T~lam}(|T| - r_C(T))`` without sampling error.

    Subset enumeration for ``n <= 22``; the closed affine-flat form for codes
    with the RM(1, m) column geometry at any length.
    """
    _check_lam(lam)
    if code.n <= MAX_EXACT_LENGTH:
        D = deficiency_by_size(code)
        n = code.n
        lam = float(lam)
        return math.fsum(d * lam ** t * (1 - lam) ** (n - t) for t, d in enumerate(D) if d)
    m = affine_geometry_order(code)
    if m is not None:
        return float(m_lambda_affine(m, lam))
    raise CapacityError(f"no exact route for n={code.n}, k={code.k}; use m_lambda_mc")


def _mc_deficiencies(code: LinearCode, lams: Sequence[float], samples: int, seed: int) -> np.ndarray:
    """``(len(lams), samples)`` array of ``|T| - r(T)`` on a shared uniform stream."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    cols = np.array(code.columns(), dtype=np.uint64)
    out = np.empty((len(lams), samples), dtype=np.int64)
    chunk = max(1, (1 << 21) // max(code.n, 1))
    for start in range(0, samples, chunk):
        stop = min(samples, start + chunk)
        u = rng.random((stop - start, code.n))
        for a, lam in enumerate(lams):
            keep = u < lam
            vecs = np.where(keep, cols, np.uint64(0))
            out[a, start:stop] = keep.sum(axis=1) - kernels.batch_rank(vecs, code.k)
    return out


def m_lambda_mc(code: LinearCode, lam: float, samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> tuple[float, float]:
    """Sample mean of ``|T| - r_C(T)`` and its standard error."""
    _check_lam(lam)
    d = _mc_deficiencies(code, [float(lam)], samples, seed)[0]
    se = float(d.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return float(d.mean()), se


def has_exact_route(code: LinearCode) -> bool:
    return code.n <= MAX_EXACT_LENGTH or affine_geometry_order(code) is not None


def pseudorandomness_score(code: LinearCode, samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> float:
    """``m(R)/n`` at the code's own rate; exact when possible, else Monte Carlo."""
    R = code.rate
    if has_exact_route(code):
        return m_lambda_exact(code, R) / code.n
    return m_lambda_mc(code, float(R), samples, seed)[0] / code.n


def m_lambda_shift_bound(code: LinearCode, lam, R=None) -> float:
    """``m(R) + (lam - R) n``, an upper bound on ``m(lam)`` for ``lam >= R``.

    Follows from ``m`` increasing with derivative at most ``n``.  Raises
    :class:`ContractViolation` when the exact ``m(lam)`` exceeds it.
    """
    R = code.rate if R is None else R
    if float(lam) < float(R) - 1e-12:
        raise ValueError(f"shift bound needs lambda >= R ({float(lam)} < {float(R)})")
    bound = m_lambda_exact(code, R) + (float(lam) - float(R)) * code.n
    actual = m_lambda_exact(code, lam)
    if actual > bound + 1e-9 * max(1.0, bound):
        raise ContractViolation(f"m({float(lam)}) = {actual} exceeds {bound}")
    return bound


def m_lambda_dual(code: LinearCode, lam) -> float:
    """``m`` of the dual, from ``r_{C^perp}(S) = |S| + r_C(S^c) - k``.

    ``m_{C^perp}(lam) = k - (1 - lam) n + m_C(1 - lam)``.
    """
    _check_lam(lam)
    return code.k - (1 - float(lam)) * code.n + m_lambda_exact(code, 1 - lam)


# -- profiles -----------------------------------------------------------------

@dataclass(frozen=True)
class ErasureProfile:
    code_id: str
    n: int
    k: int
    lambdas: tuple[float, ...]
    values: tuple[float, ...]
    stderrs: tuple[float, ...]
    method: str
    samples: int | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def rows(self) -> list[dict]:
        return [
            {"lambda": lam, "m_over_n": v, "stderr": se, "method": self.method,
             "seed": "" if self.seed is None else self.seed}
            for lam, v, se in zip(self.lambdas, self.values, self.stderrs)
        ]


def erasure_profile(code: LinearCode, lambdas: Sequence[float], method: str = "exact",
                    samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> ErasureProfile:
    """``m(lam)/n`` over a grid.  Monte Carlo uses one uniform stream for the
    whole grid (common random numbers), so the profile is monotone."""
    lambdas = tuple(float(x) for x in lambdas)
    for lam in lambdas:
        _check_lam(lam)
    n = code.n
    if method == "exact":
        vals = tuple(m_lambda_exact(code, lam) / n for lam in lambdas)
        return ErasureProfile(code.label, n, code.k, lambdas, vals, (0.0,) * len(vals), "exact")
    if method == "mc":
        d = _mc_deficiencies(code, lambdas, samples, seed)
        vals = tuple(float(x) / n for x in d.mean(axis=1))
        ses = tuple(float(x) / n / math.sqrt(samples) for x in d.std(axis=1, ddof=1)) if samples > 1 \
            else (math.inf,) * len(lambdas)
        return ErasureProfile(code.label, n, code.k, lambdas, vals, ses, "monte-carlo", samples, seed)
    raise ValueError(f"unknown method {method!r}")


PROFILE_COLUMNS = ("lambda", "m_over_n", "stderr", "method", "seed")


def profile_csv(profile: ErasureProfile) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=PROFILE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in profile.rows():
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
