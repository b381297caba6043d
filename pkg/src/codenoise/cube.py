"""Real functions on the Boolean cube ``{0,1}^n``.

A function is a float array of length ``2^n``; entry ``x`` is the value at
the point whose coordinate ``j`` is bit ``j`` of ``x``.  Spectral arrays use
the same indexing for frequencies.  All norms and expectations are taken
under the uniform probability measure.
"""
from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .errors import CapacityError
from .gf2 import LinearCode, weights

MAX_DENSE_DIM = 20
MAX_DIRECT_DIM = 10
_LOG_DOMAIN_Q = 8


def cube_dim(f: np.ndarray) -> int:
    size = np.shape(f)[-1]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"length {size} is not a power of two")
    if n > MAX_DENSE_DIM:
        raise CapacityError(f"dimension {n} exceeds dense budget {MAX_DENSE_DIM}")
    return n


def _transform(f: np.ndarray) -> np.ndarray:
    out = np.array(f, dtype=np.float64, copy=True)
    if out.ndim == 1:
        kernels.fwht_float(out)
    else:
        kernels.get_backend("python").fwht_float(out)
    return out


def fwht(f: np.ndarray) -> np.ndarray:
    """Walsh coefficients ``E_y f(y) (-1)^<x,y>``; works along the last axis."""
    n = cube_dim(f)
    return _transform(f) / (1 << n)


def ifwht(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`fwht`: ``f(y) = sum_x c(x) (-1)^<x,y>``."""
    cube_dim(coeffs)
    return _transform(coeffs)


def frequency_weights(n: int) -> np.ndarray:
    return weights(np.arange(1 << n, dtype=np.uint64))


def _check_eps(eps: float) -> None:
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"noise rate must lie in [0, 1/2], got {eps}")


def noise_operator(f: np.ndarray, eps: float) -> np.ndarray:
    """``T_eps f`` computed in the Walsh basis (multiplier ``(1-2 eps)^|x|``)."""
    _check_eps(eps)
    n = cube_dim(f)
    if eps == 0.0:
        return np.array(f, dtype=np.float64, copy=True)
    rho = np.power(1.0 - 2.0 * eps, frequency_weights(n))  # 0**0 == 1
    return ifwht(fwht(f) * rho)


def noise_operator_direct(f: np.ndarray, eps: float) -> np.ndarray:
    """Kernel sum ``sum_y eps^|y-x| (1-eps)^(n-|y-x|) f(y)``; O(4^n), n <= 10."""
    _check_eps(eps)
    f = np.asarray(f, dtype=np.float64)
    n = cube_dim(f)
    if n > MAX_DIRECT_DIM:
        raise CapacityError(f"direct noise kernel limited to n <= {MAX_DIRECT_DIM}")
    pts = np.arange(1 << n, dtype=np.uint64)
    dist = weights(pts[:, None] ^ pts[None, :])
    kern = np.power(eps, dist) * np.power(1.0 - eps, n - dist)
    return f @ kern.T


def _check_q(q: float) -> None:
    if not (q == math.inf or q >= 1):
        raise ValueError(f"norm exponent must be >= 1 or inf, got {q}")


def log2_lq_norm(f: np.ndarray, q: float) -> float:
    """``log2 (E|f|^q)^(1/q)``; ``q = inf`` gives ``log2 max|f|``.

    Compensated summation below ``q = 8``; log-sum-exp from there on.
    """
    _check_q(q)
    a = np.abs(np.asarray(f, dtype=np.float64))
    if q != math.inf and q != int(q) and np.any(np.asarray(f) < 0):
        raise ValueError("non-integer q requires a nonnegative function")
    if q == math.inf:
        top = a.max()
        return math.log2(top) if top > 0 else -math.inf
    size = a.shape[-1]
    if q < _LOG_DOMAIN_Q:
        s = math.fsum((a ** q).tolist())
        return (math.log2(s) - math.log2(size)) / q if s > 0 else -math.inf
    with np.errstate(divide="ignore"):
        logs = q * np.log(a)
    lse = logsumexp(logs)
    return (lse - math.log(size)) / (q * math.log(2))


def lq_norm(f: np.ndarray, q: float) -> float:
    """``(E|f|^q)^(1/q)`` under the uniform measure; ``max|f|`` for ``q = inf``."""
    return 2.0 ** log2_lq_norm(f, q)


def batch_log2_norms(fs: np.ndarray, q: float) -> np.ndarray:
    """Row-wise :func:`log2_lq_norm` for a 2-D array of nonnegative functions."""
    _check_q(q)
    a = np.abs(np.asarray(fs, dtype=np.float64))
    with np.errstate(divide="ignore"):
        if q == math.inf:
            return np.log2(a.max(axis=-1))
        logs = q * np.log(a)
        lse = logsumexp(logs, axis=-1)
    return (lse - math.log(a.shape[-1])) / (q * math.log(2))


def conditional_expectation(f: np.ndarray, T: Iterable[int]) -> np.ndarray:
    """``E(f|T)(x)``: average of ``f`` over points agreeing with ``x`` on ``T``."""
    f = np.asarray(f, dtype=np.float64)
    n = cube_dim(f)
    keep = set()
    for j in T:
        j = int(j)
        if not 0 <= j < n:
            raise ValueError(f"coordinate {j} out of range 0..{n - 1}")
        keep.add(j)
    if n == 0:
        return f.copy()
    # axis a of the reshaped array is coordinate n-1-a
    cube = f.reshape((2,) * n)
    drop = tuple(n - 1 - j for j in range(n) if j not in keep)
    if not drop:
        return f.copy()
    avg = cube.mean(axis=drop, keepdims=True)
    return np.broadcast_to(avg, cube.shape).reshape(-1).copy()


def average_out(f: np.ndarray, j: int) -> np.ndarray:
    """Average over coordinate ``j`` only; works along the last axis."""
    f = np.asarray(f)
    size = f.shape[-1]
    v = f.reshape(*f.shape[:-1], size >> (j + 1), 2, 1 << j)
    m = v.mean(axis=-2, keepdims=True)
    return np.broadcast_to(m, v.shape).reshape(f.shape)


def all_conditional_log2_norms(fs: np.ndarray, qs: Iterable[float]) -> dict[float, np.ndarray]:
    """``log2 ||E(f|T)||_q`` for every subset mask ``T`` and each ``q``.

    ``fs`` is ``(batch, 2^n)``; results are ``(batch, 2^n)`` arrays indexed by
    mask.  ``E(f|T)`` is obtained from ``E(f|T + {j})`` by averaging out the
    lowest coordinate missing from ``T``, so masks are visited in decreasing
    numeric order.
    """
    fs = np.atleast_2d(np.asarray(fs, dtype=np.float64))
    n = cube_dim(fs)
    if n > 12:
        raise CapacityError("exhaustive conditional norms limited to n <= 12")
    qs = list(qs)
    size = 1 << n
    full = size - 1
    out = {q: np.empty((fs.shape[0], size)) for q in qs}
    # every intermediate array is kept, so bound rows * 4^n
    step = max(1, (1 << 22) // (size * size))
    for start in range(0, fs.shape[0], step):
        rows = slice(start, start + step)
        cond = {full: fs[rows]}
        for mask in range(full, -1, -1):
            if mask != full:
                free = ~mask & full
                j = (free & -free).bit_length() - 1
                cond[mask] = average_out(cond[mask | (1 << j)], j)
            for q in qs:
                out[q][rows, mask] = batch_log2_norms(cond[mask], q)
    return out


def indicator(code: LinearCode) -> np.ndarray:
    """``1_C`` as a dense function."""
    n = code.n
    if n > MAX_DENSE_DIM:
        raise CapacityError(f"dimension {n} exceeds dense budget {MAX_DENSE_DIM}")
    f = np.zeros(1 << n)
    f[code.codewords().astype(np.int64)] = 1.0
    return f


def scaled_indicator(code: LinearCode) -> np.ndarray:
    """``(2^n / |C|) 1_C``, the density of the uniform distribution on ``C``."""
    return indicator(code) * float(2 ** (code.n - code.k))


def point_mass(n: int, x: int = 0) -> np.ndarray:
    f = np.zeros(1 << n)
    f[x] = 1.0
    return f
