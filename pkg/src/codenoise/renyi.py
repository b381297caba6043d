"""Norm decay under BSC noise, Renyi entropies and undetected-error exponents.

Throughout, ``f = (2^n/|C|) 1_C`` is the density of the uniform distribution
on a code and ``f_eps = T_eps f``.  Logarithms are base 2.
"""
from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass

import numpy as np

from . import cube
from .erasure import m_lambda_exact
from .errors import ContractViolation
from .gf2 import LinearCode, WeightDistribution, weight_distribution
from .psi import lambda_of

__all__ = [
    "lambda_of", "theorem12_sides", "theorem12_batch", "prop13_upper", "prop13_actual",
    "prop13_lower", "renyi_entropy", "renyi_after_bsc", "RenyiReport", "p_ue",
    "corollary15_check", "repetition_pair_forms", "concavity_check_g", "subset_weights",
]

THEOREM_TOL = 1e-9


def _norm_factor(q: float) -> float:
    return 1.0 if q == math.inf else (q - 1.0) / q


def _check_theorem_q(q: float) -> None:
    if q != math.inf and (q != int(q) or q < 2):
        raise ValueError(f"the inequality is checked for integer q >= 2 or inf, got {q}")


def subset_weights(n: int, lam: float) -> np.ndarray:
    """``P(T = mask) = lam^|T| (1-lam)^(n-|T|)`` for every mask."""
    sizes = cube.frequency_weights(n)
    return np.power(lam, sizes) * np.power(1.0 - lam, n - sizes)


def theorem12_sides(f: np.ndarray | None, q: float, eps: float, code: LinearCode | None = None) -> tuple[float, float]:
    """``(log2 ||f_eps||_q, E_{T~lam} log2 ||E(f|T)||_q)`` with ``lam = lambda(q, eps)``.

    With ``code`` given, ``f`` defaults to its scaled indicator and the right
    side uses ``log2 ||E(f|T)||_q = ((q-1)/q)(|T| - r_C(T))``, so any length in
    the rank budget works.  Otherwise the right side is an exhaustive sum
    over subsets (``n <= 12``).
    """
    _check_theorem_q(q)
    if f is None:
        if code is None:
            raise ValueError("need f or code")
        f = cube.scaled_indicator(code)
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("f must be nonnegative")
    lam = lambda_of(q, eps)
    lhs = cube.log2_lq_norm(cube.noise_operator(f, eps), q)
    if code is not None:
        rhs = _norm_factor(q) * m_lambda_exact(code, lam)
    else:
        n = cube.cube_dim(f)
        logs = cube.all_conditional_log2_norms(f[None, :], [q])[q][0]
        rhs = math.fsum(subset_weights(n, lam) * logs)
    return lhs, rhs


def theorem12_batch(fs: np.ndarray, qs: Sequence[float], epss: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Both sides for many functions at once; arrays of shape ``(batch, len(qs), len(epss))``."""
    fs = np.atleast_2d(np.asarray(fs, dtype=np.float64))
    if np.any(fs < 0):
        raise ValueError("functions must be nonnegative")
    for q in qs:
        _check_theorem_q(q)
    n = cube.cube_dim(fs)
    coeffs = cube.fwht(fs)
    freq = cube.frequency_weights(n)
    lhs = np.empty((fs.shape[0], len(qs), len(epss)))
    rhs = np.empty_like(lhs)
    cond = cube.all_conditional_log2_norms(fs, qs)
    for b, eps in enumerate(epss):
        noisy = cube.ifwht(coeffs * np.power(1.0 - 2.0 * eps, freq))
        noisy = np.maximum(noisy, 0.0)
        for a, q in enumerate(qs):
            lhs[:, a, b] = cube.batch_log2_norms(noisy, q)
            rhs[:, a, b] = cond[q] @ subset_weights(n, lambda_of(q, eps))
    return lhs, rhs


def prop13_actual(code: LinearCode, q: float, eps: float) -> float:
    """``(1/n) log2 ||f_eps||_q`` for the scaled indicator of ``code``."""
    f = cube.noise_operator(cube.scaled_indicator(code), eps)
    return cube.log2_lq_norm(f, q) / code.n


def prop13_upper(code: LinearCode, q: float, eps: float) -> float:
    """``((q-1)/q)(m(R)/n + lam - R)``: a finite-n upper bound on
    ``(1/n) log2 ||f_eps||_q`` valid when ``lam(q, eps) >= R``."""
    lam = lambda_of(q, eps)
    R = float(code.rate)
    if lam < R:
        raise ValueError(f"need lambda(q, eps) >= R, got {lam} < {R}")
    return _norm_factor(q) * (m_lambda_exact(code, code.rate) / code.n + lam - R)


def prop13_lower(f: np.ndarray, q: float, eps: float) -> float:
    """``(1/q) log2(eps^q + (1-eps)^q) + (1/n) log2 ||f||_q``, a lower bound on
    ``(1/n) log2 ||f_eps||_q`` for every nonnegative ``f``; equality for point
    masses.  At ``q = inf`` the first term is ``log2(1 - eps)``."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("f must be nonnegative")
    if not (q == math.inf or (q >= 1 and q == int(q))):
        raise ValueError(f"q must be an integer >= 1 or inf, got {q}")
    n = cube.cube_dim(f)
    if q == math.inf:
        first = math.log2(1.0 - eps)
    else:
        first = math.log2(eps ** q + (1.0 - eps) ** q) / q
    return first + cube.log2_lq_norm(f, q) / n


def renyi_entropy(P: np.ndarray, q: float) -> float:
    """``-(1/(q-1)) log2 sum P^q`` in bits; min-entropy at ``q = inf``."""
    P = np.asarray(P, dtype=np.float64)
    if np.any(P < 0) or abs(math.fsum(P.tolist()) - 1.0) > 1e-9:
        raise ValueError("P must be a probability vector")
    if q == 1:
        raise ValueError("q = 1 (Shannon) is not covered")
    if q == math.inf:
        return -math.log2(P.max())
    if q <= 0:
        raise ValueError("q must be positive")
    nz = P[P > 0]
    return -math.log2(math.fsum((nz ** q).tolist())) / (q - 1.0)


@dataclass(frozen=True)
class RenyiReport:
    code_id: str
    q: float
    eps: float
    lam: float
    h_in: float
    h_out: float
    lower: float
    upper: float


def renyi_after_bsc(code: LinearCode, q: float, eps: float) -> RenyiReport:
    """``H_q(X + Z)`` for ``X`` uniform on ``code`` and ``Z ~ BSC(eps)``.

    Uses ``log2 ||f_eps||_q = ((q-1)/q)(n - H_q(X+Z))``.  ``upper`` is
    ``(1 - (lam - R)) n`` (exact for every input of entropy ``Rn``); ``lower``
    is ``(1 - max(lam - R, 0)) n - m(R)``, the finite-n form of the
    pseudorandom-code bound.
    """
    n = code.n
    lam = lambda_of(q, eps)
    R = float(code.rate)
    log_norm = cube.log2_lq_norm(cube.noise_operator(cube.scaled_indicator(code), eps), q)
    h_out = n - log_norm / _norm_factor(q)
    upper = (1.0 - (lam - R)) * n
    lower = (1.0 - max(lam - R, 0.0)) * n - m_lambda_exact(code, code.rate)
    return RenyiReport(code.label, q, eps, lam, float(code.k), h_out, lower, upper)


def p_ue(W: WeightDistribution | LinearCode, eps: float) -> float:
    """``sum_{i>=1} a_i eps^i (1-eps)^(n-i)`` (no ``1/|C|`` prefactor)."""
    if isinstance(W, LinearCode):
        W = weight_distribution(W)
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"eps must lie in [0, 1/2], got {eps}")
    n = W.n
    return math.fsum(a * eps ** i * (1.0 - eps) ** (n - i) for i, a in enumerate(W.counts) if i and a)


def corollary15_check(code: LinearCode, eps: float) -> tuple[float, float]:
    """``(-(1/n) log2 P_ue, (1 - R) - m(R)/n)``.

    Requires ``1 + log2(1 - eps) <= R``.  Raises :class:`ContractViolation` if
    the exponent falls below the certified bound by more than ``1e-9``.
    """
    R = float(code.rate)
    if 1.0 + math.log2(1.0 - eps) > R + 1e-15:
        raise ValueError(f"need 1 + log2(1 - eps) <= R; eps={eps}, R={R}")
    p = p_ue(code, eps)
    exponent = -math.log2(p) / code.n if p > 0 else math.inf
    bound = (1.0 - R) - m_lambda_exact(code, code.rate) / code.n
    if exponent < bound - 1e-9:
        raise ContractViolation(f"undetected-error exponent {exponent} below certified {bound}")
    return exponent, bound


def repetition_pair_forms(n: int, eps: float, verify: bool = True) -> tuple[float, float, float]:
    """Closed forms for ``C = {(u, u)}``, ``f = |C| 1_C``:

    ``lhs = (1/n) log2 ||f_eps||_2^2 = log2(1 + (1-2eps)^4) / 2`` and
    ``rhs = (1/n) E_T log2 ||E(f|T)||_2^2 = lambda(2, eps)^2 / 2``.
    Returns ``(lhs, rhs, rhs - lhs)``; with ``verify`` both are recomputed
    from the code (``n <= 20``) and must agree to ``1e-9``.
    """
    if n % 2 or n < 2:
        raise ValueError("n must be even and positive")
    lam = lambda_of(2, eps)
    lhs = 0.5 * math.log2(1.0 + (1.0 - 2.0 * eps) ** 4)
    rhs = 0.5 * lam * lam
    gap = rhs - lhs
    if verify and n <= 20:
        from .gf2 import repetition_pair

        code = repetition_pair(n)
        f = cube.scaled_indicator(code)
        direct_lhs = 2 * cube.log2_lq_norm(cube.noise_operator(f, eps), 2) / n
        direct_rhs = m_lambda_exact(code, lam) / n
        if abs(direct_lhs - lhs) > 1e-9 or abs(direct_rhs - rhs) > 1e-9:
            raise ContractViolation(f"closed forms disagree with direct values at n={n}, eps={eps}")
    if 0 < eps < 0.5 and not gap > 0:
        raise ContractViolation(f"expected a strict gap at eps={eps}, got {gap}")
    return lhs, rhs, gap


def _g(z: float) -> float:
    return math.log(math.log2(1.0 + math.exp(z)))


def concavity_check_g(zs: Sequence[float], h: float = 1e-3) -> bool:
    """For ``g(z) = ln log2(1 + e^z)``: ``2 g(z) > g(2z)`` and ``g''(z) < 0``
    (central differences) at every ``z < 0`` of the grid."""
    for z in zs:
        if z >= 0:
            raise ValueError("grid must be negative")
        if not 2 * _g(z) > _g(2 * z):
            return False
        second = (_g(z + h) - 2 * _g(z) + _g(z - h)) / (h * h)
        if not second < 0:
            return False
    return True


def records_json(records: Sequence[dict], meta: dict) -> str:
    return json.dumps({"meta": meta, "records": list(records)}, indent=1, sort_keys=True) + "\n"


def report_record(report: RenyiReport) -> dict:
    return asdict(report)
