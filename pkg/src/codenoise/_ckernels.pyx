# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

Every function here has a numpy counterpart in :mod:`codenoise._pykernels`
with the same signature.  The two are written independently (different
algorithms where it matters) so the test-suite can use one as an oracle
for the other.
"""
import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint32_t, uint64_t
from libc.string cimport memcpy


def fwht_float(double[::1] a):
    """Unnormalised in-place Walsh-Hadamard butterflies."""
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double x, y
    with nogil:
        while h < size:
            i = 0
            while i < size:
                for j in range(i, i + h):
                    x = a[j]
                    y = a[j + h]
                    a[j] = x + y
                    a[j + h] = x - y
                i += 2 * h
            h *= 2


def fwht_int(int64_t[::1] a):
    """Integer variant of :func:`fwht_float`; exact while entries fit int64."""
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef int64_t x, y
    with nogil:
        while h < size:
            i = 0
            while i < size:
                for j in range(i, i + h):
                    x = a[j]
                    y = a[j + h]
                    a[j] = x + y
                    a[j + h] = x - y
                i += 2 * h
            h *= 2


cdef inline int _insert(uint64_t *basis, uint64_t v, int k) noexcept nogil:
    # basis[b] is either 0 or a vector whose leading bit is b
    cdef int b
    for b in range(k - 1, -1, -1):
        if (v >> b) & 1:
            if basis[b] == 0:
                basis[b] = v
                return 1
            v ^= basis[b]
    return 0


cdef void _dfs(int j, int n, int k, uint64_t mask, int r,
               const uint64_t *cols, uint64_t *stack, uint8_t *out) noexcept nogil:
    cdef uint64_t *cur
    cdef uint64_t *nxt
    cdef int add
    if j == n:
        out[mask] = <uint8_t>r
        return
    cur = stack + j * 64
    nxt = stack + (j + 1) * 64
    memcpy(nxt, cur, k * sizeof(uint64_t))
    _dfs(j + 1, n, k, mask, r, cols, stack, out)
    if r == k:
        # full rank already: every superset keeps rank k
        _dfs(j + 1, n, k, mask | (<uint64_t>1 << j), r, cols, stack, out)
        return
    memcpy(nxt, cur, k * sizeof(uint64_t))
    add = _insert(nxt, cols[j], k)
    _dfs(j + 1, n, k, mask | (<uint64_t>1 << j), r + add, cols, stack, out)


def subset_ranks(cols, int n, int k):
    """Rank of every column subset, indexed by bitmask.

    Depth-first over include/exclude decisions; each branch extends the
    parent's echelon basis by one column, so a node costs O(k).
    """
    cdef uint64_t[::1] c = np.ascontiguousarray(cols, dtype=np.uint64)
    out_arr = np.zeros(1 << n, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    stack_arr = np.zeros((n + 1) * 64, dtype=np.uint64)
    cdef uint64_t[::1] stack = stack_arr
    if k == 0:
        return out_arr
    with nogil:
        _dfs(0, n, k, 0, 0, &c[0], &stack[0], &out[0])
    return out_arr


def batch_rank(vecs, int k):
    """GF(2) rank of each row of a 2-D array of packed vectors."""
    cdef uint64_t[:, ::1] v = np.ascontiguousarray(vecs, dtype=np.uint64)
    cdef Py_ssize_t rows = v.shape[0], width = v.shape[1], s, t
    out_arr = np.zeros(rows, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef uint64_t basis[64]
    cdef int b
    with nogil:
        for s in range(rows):
            for b in range(k):
                basis[b] = 0
            for t in range(width):
                if v[s, t]:
                    out[s] += _insert(basis, v[s, t], k)
    return out_arr


def pair_sum_total(idx, int k):
    """Sum over s of P(s)^2, P(s) = #{(a, b): a ^ b = s}, in a 2^k table."""
    cdef int64_t[::1] w = np.ascontiguousarray(idx, dtype=np.int64)
    cdef Py_ssize_t m = w.shape[0], a, b
    counts_arr = np.zeros(1 << k, dtype=np.uint32)
    cdef uint32_t[::1] counts = counts_arr
    cdef uint64_t total = 0, c
    cdef Py_ssize_t s, size = counts.shape[0]
    with nogil:
        for a in range(m):
            for b in range(m):
                counts[w[a] ^ w[b]] += 1
        for s in range(size):
            c = counts[s]
            total += c * c
    return int(total)


cdef inline int _rank_of_three(uint64_t a, uint64_t b, uint64_t c) noexcept nogil:
    cdef uint64_t basis[3]
    cdef uint64_t vals[3]
    cdef uint64_t v, t
    cdef int r = 0, i, j
    vals[0] = a
    vals[1] = b
    vals[2] = c
    for i in range(3):
        v = vals[i]
        for j in range(r):
            t = v ^ basis[j]
            if t < v:
                v = t
        if v:
            # keep basis sorted by decreasing value so leading bits stay ordered
            j = r
            while j > 0 and basis[j - 1] < v:
                basis[j] = basis[j - 1]
                j -= 1
            basis[j] = v
            r += 1
    return r


def census_oracle(words, table):
    """Classify every ordered 4-tuple of ``words`` summing to zero.

    ``table[x]`` must be 1 exactly when ``x`` is one of the words.  The
    fourth entry is forced to ``a ^ b ^ c``, so the loop is cubic.
    Returns ``(total, trivial, rank3, other)``.
    """
    cdef uint64_t[::1] w = np.ascontiguousarray(words, dtype=np.uint64)
    cdef uint8_t[::1] tab = np.ascontiguousarray(table, dtype=np.uint8)
    cdef Py_ssize_t m = w.shape[0], i, j, l
    cdef uint64_t a, b, c, d
    cdef uint64_t total = 0, trivial = 0, rank3 = 0, other = 0
    with nogil:
        for i in range(m):
            a = w[i]
            for j in range(m):
                b = w[j]
                for l in range(m):
                    c = w[l]
                    d = a ^ b ^ c
                    if not tab[d]:
                        continue
                    total += 1
                    if (a == b and c == d) or (a == c and b == d) or (a == d and b == c):
                        trivial += 1
                    elif _rank_of_three(a, b, c) == 3:
                        rank3 += 1
                    else:
                        other += 1
    return int(total), int(trivial), int(rank3), int(other)
