"""Binary linear codes with bit-packed vectors.

Conventions
-----------
A vector of length ``n`` is a Python int (or a ``uint64`` array entry);
coordinate ``j`` (0-based) is bit ``j``.  In the matrix file format the
``j``-th character of a row is coordinate ``j``.  Index sets ``T`` are
0-based iterables of coordinates.

Codewords are enumerated in *coefficient order*: the codeword at position
``c`` is the XOR of the generators ``g_r`` for which bit ``r`` of ``c`` is
set.  XOR of positions therefore corresponds to XOR of codewords, which the
census code relies on.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

from .errors import CapacityError, InconsistencyError
from .krawtchouk import krawtchouk_matrix

MAX_LENGTH = 256
MAX_WORD_BITS = 64
MAX_ENUM_DIM = 26


def popcount(x: int) -> int:
    return int(x).bit_count()


def weights(words: np.ndarray) -> np.ndarray:
    """Hamming weights of an array of packed words."""
    return np.bitwise_count(np.asarray(words, dtype=np.uint64)).astype(np.int64)


def rref(rows: Iterable[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form over GF(2).

    The pivot of a row is its lowest set bit (the first column).  Returns the
    nonzero reduced rows sorted by pivot, and the pivot columns.
    """
    basis: list[int] = []
    for v in rows:
        v = int(v)
        for b in basis:
            if v >> _low(b) & 1:
                v ^= b
        if not v:
            continue
        p = _low(v)
        basis = [b ^ v if b >> p & 1 else b for b in basis]
        basis.append(v)
    basis.sort(key=_low)
    return basis, [_low(b) for b in basis]


def _low(v: int) -> int:
    return (v & -v).bit_length() - 1


def gf2_rank(vectors: Iterable[int]) -> int:
    """Rank of a collection of packed vectors."""
    basis: dict[int, int] = {}
    for v in vectors:
        v = int(v)
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def kernel(rows: Sequence[int], n: int) -> list[int]:
    """Basis of ``{x : <row, x> = 0 for every row}``."""
    reduced, pivots = rref(rows)
    pivset = set(pivots)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        v = 1 << f
        for r, p in zip(reduced, pivots):
            if r >> f & 1:
                v |= 1 << p
        out.append(v)
    return out


def _check_length(n: int) -> None:
    if not 1 <= n <= MAX_LENGTH:
        raise ValueError(f"block length must be in 1..{MAX_LENGTH}, got {n}")


@dataclass(frozen=True)
class LinearCode:
    """A binary linear code of length ``n`` stored by its canonical RREF basis.

    Two codes compare equal exactly when they have the same codeword set.
    ``name`` is a display label and takes no part in equality.
    """

    n: int
    generators: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        _check_length(self.n)
        reduced, _ = rref(self.generators)
        if len(reduced) != len(self.generators):
            raise InconsistencyError("generators are linearly dependent")
        if any(g >> self.n for g in reduced):
            raise ValueError(f"generator has bits beyond length {self.n}")
        object.__setattr__(self, "generators", tuple(reduced))

    @classmethod
    def from_generators(cls, n: int, rows: Iterable[int], name: str = "", *, strict: bool = True) -> LinearCode:
        """Build a code from rows; with ``strict=False`` dependent rows are dropped."""
        rows = [int(r) for r in rows]
        reduced, _ = rref(rows)
        if strict and len(reduced) != len(rows):
            raise InconsistencyError(f"{len(rows)} rows span only dimension {len(reduced)}")
        return cls(n, tuple(reduced), name)

    @classmethod
    def from_matrix(cls, matrix, name: str = "", *, strict: bool = True) -> LinearCode:
        arr = np.asarray(matrix, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("generator matrix must be 2-D")
        rows = [int(sum(int(b) << j for j, b in enumerate(row))) for row in arr]
        return cls.from_generators(arr.shape[1], rows, name, strict=strict)

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def label(self) -> str:
        return self.name or f"code(n={self.n},k={self.k})"

    def generator_matrix(self) -> np.ndarray:
        out = np.zeros((self.k, self.n), dtype=np.uint8)
        for r, g in enumerate(self.generators):
            for j in range(self.n):
                out[r, j] = g >> j & 1
        return out

    def columns(self) -> list[int]:
        """Column ``j`` of the generator matrix packed as a k-bit integer."""
        cols = [0] * self.n
        for r, g in enumerate(self.generators):
            for j in range(self.n):
                if g >> j & 1:
                    cols[j] |= 1 << r
        return cols

    def contains(self, word: int) -> bool:
        word = int(word)
        for g in self.generators:
            if word >> _low(g) & 1:
                word ^= g
        return word == 0

    def codewords(self) -> np.ndarray:
        """All codewords in coefficient order as ``uint64`` (``n <= 64``)."""
        if self.n > MAX_WORD_BITS:
            raise CapacityError(f"length {self.n} does not fit a uint64 word")
        if self.k > MAX_ENUM_DIM:
            raise CapacityError(f"dimension {self.k} exceeds enumeration budget {MAX_ENUM_DIM}")
        return _codewords(self.generators)

    def __repr__(self) -> str:
        return f"LinearCode({self.label}, n={self.n}, k={self.k})"


@lru_cache(maxsize=32)
def _codewords(generators: tuple[int, ...]) -> np.ndarray:
    words = np.zeros(1 << len(generators), dtype=np.uint64)
    size = 1
    for g in generators:
        np.bitwise_xor(words[:size], np.uint64(g), out=words[size:2 * size])
        size *= 2
    words.flags.writeable = False
    return words


# -- constructors -----------------------------------------------------------

def full_space(n: int) -> LinearCode:
    return LinearCode(n, tuple(1 << j for j in range(n)), f"full({n})")


def zero_code(n: int) -> LinearCode:
    return LinearCode(n, (), f"zero({n})")


def repetition_pair(n: int) -> LinearCode:
    """``{(u, u)}``: coordinate ``j`` is twinned with ``j + n/2``; self-dual."""
    if n % 2:
        raise ValueError("repetition-pair code needs even n")
    half = n // 2
    return LinearCode(n, tuple((1 << j) | (1 << (j + half)) for j in range(half)), f"rep-pair({n})")


def reed_muller(r: int, m: int) -> LinearCode:
    """RM(r, m): coordinate ``x`` in ``0..2^m-1`` is the point with bits of ``x``."""
    if not 0 <= r <= m:
        raise ValueError(f"need 0 <= r <= m, got r={r}, m={m}")
    n = 1 << m
    _check_length(n)
    points = np.arange(n)
    rows = []
    for deg in range(r + 1):
        for mono in combinations(range(m), deg):
            sel = np.ones(n, dtype=bool)
            for v in mono:
                sel &= (points >> v & 1).astype(bool)
            rows.append(int(sum(1 << int(x) for x in points[sel])))
    return LinearCode.from_generators(n, rows, f"RM({r},{m})")


def random_parity_matrix(n: int, rows: int, rng: np.random.Generator) -> list[int]:
    """``rows`` uniformly random length-``n`` rows."""
    if rows == 0:
        return []
    bits = rng.integers(0, 2, size=(rows, n), dtype=np.uint8)
    return [int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little") for row in bits]


def _rows_for(n: int, lam) -> int:
    frac = Fraction(lam).limit_denominator(1 << 20)
    rows = frac * n
    if rows.denominator != 1 or not 0 <= rows <= n:
        raise ValueError(f"lambda * n must be an integer in [0, n], got {float(frac) * n}")
    return int(rows)


def sample_random_code(n: int, lam, seed: int) -> LinearCode:
    """Kernel of a uniformly random ``(lam*n) x n`` parity-check matrix.

    The dimension is whatever the kernel has (``n - rank``); no resampling.
    """
    _check_length(n)
    rng = np.random.default_rng(seed)
    checks = random_parity_matrix(n, _rows_for(n, lam), rng)
    return LinearCode.from_generators(n, kernel(checks, n), f"random(n={n},lam={Fraction(lam).limit_denominator(1 << 20)},seed={seed})")


def random_code(n: int, k: int, seed: int) -> LinearCode:
    """A uniformly random ``k``-dimensional code (rejection on rank)."""
    _check_length(n)
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    rng = np.random.default_rng(seed)
    while True:
        rows = random_parity_matrix(n, k, rng)
        if gf2_rank(rows) == k:
            return LinearCode.from_generators(n, rows, f"random(n={n},k={k},seed={seed})")


def random_basis(code: LinearCode, rng: np.random.Generator) -> list[int]:
    """A random basis of the same code (random invertible recombination)."""
    k = code.k
    while True:
        mix = random_parity_matrix(k, k, rng) if k else []
        if gf2_rank(mix) == k:
            break
    out = []
    for row in mix:
        v = 0
        for r, g in enumerate(code.generators):
            if row >> r & 1:
                v ^= g
        out.append(v)
    return out


# -- operations -------------------------------------------------------------

def _mask(T: Iterable[int], n: int) -> int:
    mask = 0
    for j in T:
        j = int(j)
        if not 0 <= j < n:
            raise ValueError(f"coordinate {j} out of range 0..{n - 1}")
        mask |= 1 << j
    return mask


def column_rank(rows: Sequence[int], n: int, T: Iterable[int]) -> int:
    """Rank of the columns indexed by ``T`` of the matrix with these rows."""
    mask = _mask(T, n)
    return gf2_rank(r & mask for r in rows)


def rank_of_columns(code: LinearCode, T: Iterable[int]) -> int:
    """``r_C(T)``: rank of the generator-matrix columns indexed by ``T``.

    Row rank of the restricted matrix equals its column rank, so the rows
    are simply masked to ``T``.
    """
    return column_rank(code.generators, code.n, T)


def dual_code(code: LinearCode) -> LinearCode:
    name = f"dual({code.name})" if code.name else ""
    return LinearCode.from_generators(code.n, kernel(code.generators, code.n), name)


def enumerate_codewords(code: LinearCode) -> Iterator[int]:
    """Yield every codeword once, in coefficient order."""
    for w in code.codewords():
        yield int(w)


@dataclass(frozen=True)
class WeightDistribution:
    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.n + 1:
            raise ValueError("need n + 1 counts")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    @property
    def size(self) -> int:
        return sum(self.counts)

    def __getitem__(self, i: int) -> int:
        return self.counts[i]


def weight_distribution(code: LinearCode) -> WeightDistribution:
    if code.n > MAX_WORD_BITS:
        if code.k > 20:
            raise CapacityError(f"dimension {code.k} too large for long-word enumeration")
        counts = [0] * (code.n + 1)
        words = [0]
        for g in code.generators:
            words += [w ^ g for w in words]
        for w in words:
            counts[w.bit_count()] += 1
        return WeightDistribution(code.n, tuple(counts))
    counts = np.bincount(weights(code.codewords()), minlength=code.n + 1)
    return WeightDistribution(code.n, tuple(int(c) for c in counts))


def macwilliams_transform(W: WeightDistribution, k: int | None = None) -> WeightDistribution:
    """Weight distribution of the dual: ``b_j = 2^-k sum_i a_i K_j(i)``, exactly."""
    size = W.size
    if k is None:
        k = size.bit_length() - 1
    if size != 1 << k:
        raise InconsistencyError(f"distribution has {size} words, expected 2^{k}")
    K = krawtchouk_matrix(W.n)
    out = []
    for j in range(W.n + 1):
        s = sum(a * K[j][i] for i, a in enumerate(W.counts))
        if s % size or s < 0:
            raise InconsistencyError(f"dual count at weight {j} is {s}/{size}")
        out.append(s // size)
    return WeightDistribution(W.n, tuple(out))


def level_set(code: LinearCode, i: int) -> np.ndarray:
    """Codewords of weight exactly ``i`` (coefficient order)."""
    if not 0 <= i <= code.n:
        raise ValueError(f"weight {i} out of range 0..{code.n}")
    words = code.codewords()
    return words[weights(words) == i]


def level_positions(code: LinearCode, i: int) -> np.ndarray:
    """Coefficient indices of the weight-``i`` codewords."""
    words = code.codewords()
    return np.flatnonzero(weights(words) == i)


def binomial_distribution(n: int) -> WeightDistribution:
    return WeightDistribution(n, tuple(comb(n, i) for i in range(n + 1)))


# -- matrix file format -----------------------------------------------------

def parse_matrix(text: str, name: str = "") -> LinearCode:
    """Parse ``"n k"`` followed by ``k`` rows of ``n`` characters from ``{0,1}``."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise ValueError(f"bad header {lines[0]!r}; expected 'n k'")
    n, k = int(head[0]), int(head[1])
    rows = lines[1:]
    if len(rows) != k:
        raise ValueError(f"header says {k} rows, found {len(rows)}")
    packed = []
    for r, row in enumerate(rows, start=2):
        if len(row) != n:
            raise ValueError(f"line {r}: ragged row of length {len(row)}, expected {n}")
        if set(row) - {"0", "1"}:
            raise ValueError(f"line {r}: characters outside {{0,1}}")
        packed.append(sum(1 << j for j, ch in enumerate(row) if ch == "1"))
    return LinearCode.from_generators(n, packed, name)


def read_matrix(path: str | Path) -> LinearCode:
    path = Path(path)
    return parse_matrix(path.read_text(), name=path.stem)


def format_matrix(code: LinearCode) -> str:
    lines = [f"{code.n} {code.k}"]
    for g in code.generators:
        lines.append("".join("1" if g >> j & 1 else "0" for j in range(code.n)))
    return "\n".join(lines) + "\n"


def write_matrix(code: LinearCode, path: str | Path) -> None:
    Path(path).write_text(format_matrix(code))
