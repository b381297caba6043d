"""Pure numpy implementations of the compiled kernels.

Same signatures as :mod:`codenoise._ckernels`.  Where a kernel has an
obvious alternative algorithm the fallback uses it, which makes the
cross-backend tests a genuine dual-route check rather than a transcription.
"""
from __future__ import annotations

import numpy as np


def _butterflies(a: np.ndarray) -> None:
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] += y
        v[..., 1, :] = x - y
        h *= 2


def fwht_float(a: np.ndarray) -> None:
    """In-place unnormalised transform along the last axis."""
    _butterflies(a)


def fwht_int(a: np.ndarray) -> None:
    _butterflies(a)


def subset_ranks(cols, n: int, k: int) -> np.ndarray:
    """Rank of every column subset via a subset-sum (zeta) transform.

    For a code of dimension k, the codewords vanishing on T form a subspace
    of size 2^(k - r(T)).  Counting codewords with support inside each set
    S is a zeta transform of the support histogram; r(T) is read off at
    S = complement of T.
    """
    cols = np.asarray(cols, dtype=np.uint64)
    if k == 0:
        return np.zeros(1 << n, dtype=np.uint8)
    bits = np.arange(n, dtype=np.uint64)
    rows = [int(np.sum(((cols >> np.uint64(r)) & np.uint64(1)) << bits)) for r in range(k)]
    words = np.zeros(1, dtype=np.int64)
    for g in rows:
        words = np.concatenate([words, words ^ g])
    z = np.bincount(words, minlength=1 << n).astype(np.int64)
    for j in range(n):
        v = z.reshape(-1, 2, 1 << j)
        v[:, 1, :] += v[:, 0, :]
    full = (1 << n) - 1
    vanishing = z[full ^ np.arange(1 << n)]
    return (k - np.log2(vanishing).astype(np.int64)).astype(np.uint8)


def batch_rank(vecs, k: int) -> np.ndarray:
    """Row-wise GF(2) rank, eliminating one bit position at a time."""
    v = np.array(vecs, dtype=np.uint64, copy=True)
    if v.ndim != 2:
        raise ValueError("expected a 2-D array")
    rows = v.shape[0]
    rank = np.zeros(rows, dtype=np.int64)
    if v.shape[1] == 0:
        return rank
    ar = np.arange(rows)
    for b in range(k - 1, -1, -1):
        has = ((v >> np.uint64(b)) & np.uint64(1)).astype(bool)
        found = has.any(axis=1)
        pivot = v[ar, has.argmax(axis=1)]
        pivot[~found] = 0
        v ^= np.where(has, pivot[:, None], np.uint64(0))
        rank += found
    return rank


def pair_sum_total(idx, k: int) -> int:
    """Sum over s of P(s)^2 with P accumulated by chunked bincount."""
    w = np.asarray(idx, dtype=np.int64)
    m = w.shape[0]
    counts = np.zeros(1 << k, dtype=np.int64)
    chunk = max(1, (1 << 22) // max(m, 1))
    for start in range(0, m, chunk):
        xs = (w[start:start + chunk, None] ^ w[None, :]).ravel()
        counts += np.bincount(xs, minlength=1 << k)
    return int(np.dot(counts, counts))


def _span_size(a, b, c) -> np.ndarray:
    span = np.stack([np.zeros_like(a), a, b, c, a ^ b, a ^ c, b ^ c, a ^ b ^ c], axis=-1)
    span.sort(axis=-1)
    return 1 + np.count_nonzero(np.diff(span, axis=-1), axis=-1)


def census_oracle(words, table):
    """Cubic enumeration; rank is taken from the size of the spanned subspace."""
    w = np.asarray(words, dtype=np.uint64)
    tab = np.asarray(table, dtype=bool)
    total = trivial = rank3 = other = 0
    bc = w[:, None] ^ w[None, :]
    for a in w:
        d = bc ^ a
        hit = tab[d.astype(np.int64)]
        if not hit.any():
            continue
        jj, ll = np.nonzero(hit)
        b, c, dd = w[jj], w[ll], d[jj, ll]
        aa = np.full_like(b, a)
        triv = ((aa == b) & (c == dd)) | ((aa == c) & (b == dd)) | ((aa == dd) & (b == c))
        full = _span_size(aa, b, c) == 8
        total += len(b)
        trivial += int(triv.sum())
        rank3 += int((full & ~triv).sum())
        other += int((~full & ~triv).sum())
    return total, trivial, rank3, other
